#pragma once

// Config documents: a small TOML subset with [system], [sweep] and [output]
// sections. Supported values are numbers, "strings", true/false and arrays of
// strings (which may span lines). Unknown keys are errors.

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "magnomech/errors.hpp"
#include "magnomech/params.hpp"
#include "magnomech/pipeline.hpp"
#include "magnomech/sweep.hpp"

namespace magnomech {

namespace toml_lite {

using Value = std::variant<double, std::string, bool, std::vector<std::string>>;

struct Entry {
  Value value;
  int line = 0;
};

/// section -> key -> entry. Keys outside any section are rejected.
using Document = std::map<std::string, std::map<std::string, Entry>>;

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] inline void fail(int line, const std::string& msg) {
  throw Error(ErrorKind::ConfigError, "line " + std::to_string(line) + ": " + msg);
}

/// Drops a trailing '#' comment that is not inside a string.
inline std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

inline std::string parse_string(std::string_view s, int line) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') fail(line, "expected a quoted string");
  std::string out(s.substr(1, s.size() - 2));
  if (out.find('"') != std::string::npos || out.find('\\') != std::string::npos)
    fail(line, "escapes and embedded quotes are not supported");
  return out;
}

inline Value parse_value(std::string_view s, int line) {
  s = trim(s);
  if (s.empty()) fail(line, "missing value");
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '"') return parse_string(s, line);
  if (s.front() == '[') {
    if (s.back() != ']') fail(line, "unterminated array");
    std::vector<std::string> items;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      std::size_t end = body.find(',');
      std::string_view item = trim(body.substr(0, end));
      if (!item.empty()) items.push_back(parse_string(item, line));
      if (end == std::string_view::npos) break;
      body = trim(body.substr(end + 1));
    }
    return items;
  }
  std::string text;
  for (char ch : s)
    if (ch != '_') text += ch;
  if (!text.empty() && text.front() == '+') text.erase(0, 1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) fail(line, "cannot parse value '" + std::string(s) + "'");
  return v;
}

inline Document parse(std::string_view text) {
  Document doc;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string_view::npos) {
      if (line.back() != ']') fail(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (doc.count(section)) fail(line_no, "duplicate section [" + section + "]");
      doc[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    if (section.empty()) fail(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    const int start_line = line_no;
    // Multi-line arrays: keep reading until the closing bracket.
    if (!value.empty() && value.front() == '[') {
      while (value.back() != ']') {
        if (!std::getline(in, raw)) fail(start_line, "unterminated array");
        ++line_no;
        value += " ";
        value += trim(strip_comment(raw));
      }
    }
    auto& sec = doc[section];
    if (sec.count(key)) fail(start_line, "duplicate key '" + key + "'");
    sec[key] = Entry{parse_value(value, start_line), start_line};
  }
  return doc;
}

}  // namespace toml_lite

struct SweepSettings {
  std::vector<SweepAxis> axes;
  MeasureSelection selection;
  bool operator==(const SweepSettings&) const = default;
};

struct OutputSettings {
  TableFormat format = TableFormat::Csv;
  std::string path;
  bool operator==(const OutputSettings&) const = default;
};

struct ConfigDocument {
  SystemParams system;
  SweepSettings sweep;
  OutputSettings output;
  bool operator==(const ConfigDocument&) const = default;
};

namespace detail {

inline double as_number(const toml_lite::Entry& e, const std::string& key) {
  if (const double* v = std::get_if<double>(&e.value)) return *v;
  toml_lite::fail(e.line, "'" + key + "' must be a number");
}

inline std::string as_string(const toml_lite::Entry& e, const std::string& key) {
  if (const auto* v = std::get_if<std::string>(&e.value)) return *v;
  toml_lite::fail(e.line, "'" + key + "' must be a string");
}

inline std::vector<std::string> as_list(const toml_lite::Entry& e, const std::string& key) {
  if (const auto* v = std::get_if<std::vector<std::string>>(&e.value)) return *v;
  toml_lite::fail(e.line, "'" + key + "' must be an array of strings");
}

inline void read_system(const std::map<std::string, toml_lite::Entry>& sec, SystemParams& p) {
  std::set<std::string> detuning_seen;
  bool g_eff_given = false;
  bool drive_given = false;
  DriveParams drive;
  for (const auto& [key, entry] : sec) {
    if (key == "cavity_noise_rate") {
      const std::string v = as_string(entry, key);
      if (v == "kappa_c")
        p.cavity_noise_rate = CavityNoiseRate::KappaC;
      else if (v == "kappa_fb")
        p.cavity_noise_rate = CavityNoiseRate::KappaFb;
      else
        toml_lite::fail(entry.line, "cavity_noise_rate must be \"kappa_c\" or \"kappa_fb\"");
      continue;
    }
    const double v = as_number(entry, key);
    if (key == "nu") {
      p.nu = v;
    } else if (key == "g_eff_hz") {
      p.g_eff_hz = v;
      g_eff_given = true;
    } else if (key == "g0_hz" || key == "rabi_hz" || key == "lambda_hz") {
      drive_given = true;
      (key == "g0_hz" ? drive.g0_hz : key == "rabi_hz" ? drive.rabi_hz : drive.lambda_hz) = v;
    } else if (key == "kappa_fb_hz") {
      p.kappa_fb_override_hz = v;
    } else if (const FieldRef* f = find_field(key)) {
      if (key.rfind("delta_", 0) == 0) {
        const std::string stem = key.substr(0, key.find(key.ends_with("_hz") ? "_hz" : "_omega_d_units"));
        if (!detuning_seen.insert(stem).second)
          toml_lite::fail(entry.line, "detuning '" + stem + "' given in more than one unit");
      }
      if (key == "tau") {
        p.tau = v;  // keep any explicit nu from the same section
      } else {
        f->set(p, v);
      }
    } else {
      toml_lite::fail(entry.line, "unknown key '" + key + "' in [system]");
    }
  }
  if (g_eff_given && drive_given)
    throw Error(ErrorKind::ConfigError, "give either g_eff_hz or {g0_hz, rabi_hz, lambda_hz}, not both");
  if (drive_given) {
    p.g_eff_hz.reset();
    p.drive = drive;
  }
}

inline void read_sweep(const std::map<std::string, toml_lite::Entry>& sec, SweepSettings& s) {
  bool triples_given = false;
  for (const auto& [key, entry] : sec) {
    if (key == "axes") {
      for (const auto& spec : as_list(entry, key)) {
        try {
          s.axes.push_back(SweepAxis::parse(spec));
        } catch (const Error& e) {
          toml_lite::fail(entry.line, e.what());
        }
      }
    } else if (key == "measures") {
      MeasureSelection& m = s.selection;
      m.log_negativity = m.steering = m.steering_asymmetry = m.discord = m.residual_contangle = false;
      for (const auto& name : as_list(entry, key)) {
        if (name == "E") m.log_negativity = true;
        else if (name == "S") m.steering = true;
        else if (name == "SASYM") m.steering_asymmetry = true;
        else if (name == "DG") m.discord = true;
        else if (name == "RMIN") m.residual_contangle = true;
        else toml_lite::fail(entry.line, "unknown measure '" + name + "' (expected E, S, SASYM, DG, RMIN)");
      }
    } else if (key == "pairs") {
      s.selection.pairs.clear();
      for (const auto& text : as_list(entry, key)) {
        const auto colon = text.find(':');
        if (colon == std::string::npos) toml_lite::fail(entry.line, "pair must look like \"M1:M2\"");
        ModePair pr{parse_mode(text.substr(0, colon)), parse_mode(text.substr(colon + 1))};
        if (pr.a == pr.b) toml_lite::fail(entry.line, "pair modes must differ");
        s.selection.pairs.push_back(pr);
      }
    } else if (key == "triples") {
      triples_given = true;
      s.selection.triples.clear();
      for (const auto& text : as_list(entry, key)) {
        ModeTriple t;
        std::size_t pos = 0;
        for (int k = 0; k < 3; ++k) {
          const std::size_t colon = text.find(':', pos);
          if ((k < 2) == (colon == std::string::npos)) toml_lite::fail(entry.line, "triple must look like \"c:M1:d\"");
          t.modes[k] = parse_mode(text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos));
          pos = colon + 1;
        }
        if (t.modes[0] == t.modes[1] || t.modes[0] == t.modes[2] || t.modes[1] == t.modes[2])
          toml_lite::fail(entry.line, "triple modes must differ");
        s.selection.triples.push_back(t);
      }
    } else {
      toml_lite::fail(entry.line, "unknown key '" + key + "' in [sweep]");
    }
  }
  if (s.selection.residual_contangle && !triples_given && s.selection.triples.empty())
    s.selection.triples.push_back(ModeTriple{});
  if (s.axes.size() > 2) throw Error(ErrorKind::ConfigError, "at most two sweep axes are supported");
}

inline void read_output(const std::map<std::string, toml_lite::Entry>& sec, OutputSettings& o) {
  for (const auto& [key, entry] : sec) {
    if (key == "format") {
      try {
        o.format = parse_format(as_string(entry, key));
      } catch (const Error& e) {
        toml_lite::fail(entry.line, e.what());
      }
    } else if (key == "path") {
      o.path = as_string(entry, key);
    } else {
      toml_lite::fail(entry.line, "unknown key '" + key + "' in [output]");
    }
  }
}

}  // namespace detail

/// Parses a config document. Missing keys keep the SystemParams defaults.
inline ConfigDocument parse_config(std::string_view text) {
  const toml_lite::Document doc = toml_lite::parse(text);
  ConfigDocument cfg;
  for (const auto& [name, section] : doc) {
    if (name == "system")
      detail::read_system(section, cfg.system);
    else if (name == "sweep")
      detail::read_sweep(section, cfg.sweep);
    else if (name == "output")
      detail::read_output(section, cfg.output);
    else
      throw Error(ErrorKind::ConfigError, "unknown section [" + name + "]");
  }
  try {
    cfg.system.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  return cfg;
}

inline ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Writes the effective config; parse_config(dump_config(c)) == c.
inline std::string dump_config(const ConfigDocument& cfg) {
  const SystemParams& p = cfg.system;
  std::ostringstream out;
  auto kv = [&out](std::string_view key, double v) { out << key << " = " << format_roundtrip(v) << '\n'; };
  auto quoted = [](const std::string& s) { return "\"" + s + "\""; };
  out << "[system]\n";
  kv("omega_c_hz", p.omega_c_hz);
  kv("omega_m1_hz", p.omega_m1_hz);
  kv("omega_m2_hz", p.omega_m2_hz);
  kv("omega_d_hz", p.omega_d_hz);
  kv("gamma_d_hz", p.gamma_d_hz);
  kv("kappa_c_hz", p.kappa_c_hz);
  kv("kappa_m1_hz", p.kappa_m1_hz);
  kv("kappa_m2_hz", p.kappa_m2_hz);
  kv("g1_hz", p.g1_hz);
  kv("g2_hz", p.g2_hz);
  if (p.g_eff_hz) kv("g_eff_hz", *p.g_eff_hz);
  if (p.drive) {
    kv("g0_hz", p.drive->g0_hz);
    kv("rabi_hz", p.drive->rabi_hz);
    kv("lambda_hz", p.drive->lambda_hz);
  }
  auto detuning = [&](std::string_view stem, const Detuning& d) {
    out << stem << (d.unit == DetuningUnit::Hz ? "_hz" : "_omega_d_units") << " = " << format_roundtrip(d.value) << '\n';
  };
  detuning("delta_c", p.delta_c);
  detuning("delta_m1_tilde", p.delta_m1_tilde);
  detuning("delta_m2", p.delta_m2);
  kv("tau", p.tau);
  if (p.nu) kv("nu", *p.nu);
  kv("phi_rad", p.phi_rad);
  kv("temperature_k", p.temperature_k);
  if (p.kappa_fb_override_hz) kv("kappa_fb_hz", *p.kappa_fb_override_hz);
  out << "cavity_noise_rate = " << quoted(p.cavity_noise_rate == CavityNoiseRate::KappaFb ? "kappa_fb" : "kappa_c") << '\n';

  const MeasureSelection& m = cfg.sweep.selection;
  out << "\n[sweep]\naxes = [";
  for (std::size_t i = 0; i < cfg.sweep.axes.size(); ++i) out << (i ? ", " : "") << quoted(cfg.sweep.axes[i].spec());
  out << "]\nmeasures = [";
  std::vector<std::string> names;
  if (m.log_negativity) names.push_back("E");
  if (m.steering) names.push_back("S");
  if (m.steering_asymmetry) names.push_back("SASYM");
  if (m.discord) names.push_back("DG");
  if (m.residual_contangle) names.push_back("RMIN");
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << quoted(names[i]);
  out << "]\npairs = [";
  for (std::size_t i = 0; i < m.pairs.size(); ++i)
    out << (i ? ", " : "") << quoted(std::string(kModeNames[m.pairs[i].a]) + ":" + std::string(kModeNames[m.pairs[i].b]));
  out << "]\ntriples = [";
  for (std::size_t i = 0; i < m.triples.size(); ++i) {
    const auto& t = m.triples[i].modes;
    out << (i ? ", " : "")
        << quoted(std::string(kModeNames[t[0]]) + ":" + std::string(kModeNames[t[1]]) + ":" + std::string(kModeNames[t[2]]));
  }
  out << "]\n\n[output]\nformat = " << quoted(cfg.output.format == TableFormat::Json ? "json" : "csv") << '\n';
  if (!cfg.output.path.empty()) out << "path = " << quoted(cfg.output.path) << '\n';
  return out.str();
}

}  // namespace magnomech
