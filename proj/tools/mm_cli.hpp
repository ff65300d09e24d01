#pragma once

// `mm` command dispatch. Kept in a header so the test suite can drive the
// CLI in-process.
//
// Exit codes: 0 ok, 1 config error, 2 unstable point, 3 pipeline error,
// 4 validation failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "magnomech/config.hpp"
#include "magnomech/pipeline.hpp"
#include "magnomech/sweep.hpp"
#include "magnomech/validate.hpp"

namespace magnomech::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kUnstable = 2, kPipelineError = 3, kValidationFailed = 4 };

inline std::string sig6(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, ptr);
}

struct Options {
  std::string config;
  std::vector<std::string> axes;
  std::string out;
  std::string format;
  std::string mutate;
  bool dump_config = false;
};

/// Loads the config and applies command-line overrides. CLI axes replace the
/// config's axes as a whole.
inline ConfigDocument resolve(const Options& opt) {
  ConfigDocument cfg = opt.config.empty() ? parse_config("") : load_config(opt.config);
  if (!opt.axes.empty()) {
    cfg.sweep.axes.clear();
    for (const auto& spec : opt.axes) {
      try {
        cfg.sweep.axes.push_back(SweepAxis::parse(spec));
      } catch (const Error& e) {
        throw Error(ErrorKind::ConfigError, e.what());
      }
    }
    if (cfg.sweep.axes.size() > 2) throw Error(ErrorKind::ConfigError, "at most two sweep axes are supported");
  }
  if (!opt.format.empty()) cfg.output.format = parse_format(opt.format);
  if (!opt.out.empty()) cfg.output.path = opt.out;
  return cfg;
}

inline nlohmann::json report_to_json(const CorrelationReport& r) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json pairs = json::array();
  for (const auto& p : r.pairs)
    pairs.push_back({{"pair", p.pair.label()}, {"E", opt(p.e_n)}, {"S_ab", opt(p.s_ab)}, {"S_ba", opt(p.s_ba)},
                     {"SASYM", opt(p.s_asym)}, {"DG", opt(p.d_g)}});
  json triples = json::array();
  for (const auto& t : r.triples) triples.push_back({{"triple", t.triple.label()}, {"RMIN", opt(t.r_min)}});
  return {{"stable", r.stable},
          {"max_real_part", r.max_real_part},
          {"kappa_fb_hz", r.cavity_hz.kappa_fb},
          {"delta_fb_hz", r.cavity_hz.delta_fb},
          {"lyapunov_residual", opt(r.lyapunov_residual)},
          {"pairs", pairs},
          {"triples", triples},
          {"notes", r.notes}};
}

inline int cmd_steady(const ConfigDocument& cfg, std::ostream& out) {
  const CorrelationReport r = evaluate(cfg.system, cfg.sweep.selection);
  out << "stability: " << (r.stable ? "stable" : (r.pipeline_error ? "unknown" : "unstable/marginal"))
      << " (max Re(lambda) = " << sig6(r.max_real_part) << " rad/s)\n";
  out << "kappa_fb/2pi = " << sig6(r.cavity_hz.kappa_fb) << " Hz, Delta_fb/2pi = " << sig6(r.cavity_hz.delta_fb)
      << " Hz\n";
  if (r.lyapunov_residual) out << "lyapunov residual = " << sig6(*r.lyapunov_residual) << '\n';
  auto line = [&out](const std::string& name, const std::optional<double>& v) {
    out << name << " = " << (v ? sig6(*v) : std::string("null")) << '\n';
  };
  const MeasureSelection& sel = cfg.sweep.selection;
  for (const auto& p : r.pairs) {
    const std::string ab = p.pair.label();
    const std::string ba = std::string(kModeNames[p.pair.b]) + std::string(kModeNames[p.pair.a]);
    if (sel.log_negativity) line("E_" + ab, p.e_n);
    if (sel.steering) {
      line("S_" + ab, p.s_ab);
      line("S_" + ba, p.s_ba);
    }
    if (sel.steering_asymmetry) line("SASYM_" + ab, p.s_asym);
    if (sel.discord) line("DG_" + ab, p.d_g);
  }
  for (const auto& t : r.triples) line("RMIN_" + t.triple.label(), t.r_min);
  for (const auto& n : r.notes) out << "note: " << n << '\n';

  if (!cfg.output.path.empty()) {
    std::ofstream f(cfg.output.path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::IoError, "cannot open '" + cfg.output.path + "'");
    f << report_to_json(r).dump(2) << '\n';
  }
  if (r.pipeline_error) return kPipelineError;
  return r.stable ? kOk : kUnstable;
}

inline void print_sweep_summary(const SweepTable& table, std::ostream& out) {
  std::size_t stable = 0;
  for (const auto& r : table.rows) stable += r.report.stable ? 1 : 0;
  out << "grid: " << table.rows.size() << " points";
  for (const auto& a : table.axes) out << " [" << a.name << " x" << a.count << "]";
  out << "\nstable fraction: " << sig6(table.rows.empty() ? 0.0 : double(stable) / double(table.rows.size())) << '\n';
  for (const auto& col : table.measure_columns()) {
    const auto values = table.column(col);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t arg = 0;
    bool any = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!values[i] || !table.rows[i].report.stable) continue;
      any = true;
      lo = std::min(lo, *values[i]);
      if (*values[i] > hi) {
        hi = *values[i];
        arg = i;
      }
    }
    out << col << ": ";
    if (!any) {
      out << "no data\n";
      continue;
    }
    out << "min " << sig6(lo) << ", max " << sig6(hi) << " at";
    for (std::size_t d = 0; d < table.axes.size(); ++d)
      out << ' ' << table.axes[d].name << '=' << sig6(table.rows[arg].coords[d]);
    out << '\n';
  }
}

inline std::string default_path(const ConfigDocument& cfg, const std::string& stem) {
  return stem + (cfg.output.format == TableFormat::Json ? ".json" : ".csv");
}

inline int cmd_sweep(ConfigDocument cfg, std::ostream& out) {
  const SweepTable table = run_sweep(cfg.system, cfg.sweep.axes, cfg.sweep.selection, default_worker_count());
  if (cfg.output.path.empty()) cfg.output.path = default_path(cfg, "mm_sweep");
  write_table(table, cfg.output.format, cfg.output.path);
  print_sweep_summary(table, out);
  out << "wrote " << cfg.output.path << '\n';
  return kOk;
}

inline int cmd_stability(ConfigDocument cfg, std::ostream& out) {
  if (cfg.sweep.axes.empty()) {
    const LinearizedModel m = build_model(cfg.system);
    const StabilityVerdict v = check_stability(m.gamma_matrix);
    const bool stable = v.stable && !m.unstable_by_construction;
    out << "verdict: " << (stable ? "stable" : "unstable/marginal") << '\n';
    out << "max Re(lambda) = " << sig6(v.max_real_part) << " rad/s, margin = " << sig6(v.margin) << " rad/s\n";
    out << "kappa_fb/2pi = " << sig6(m.cavity_hz.kappa_fb) << " Hz, Delta_fb/2pi = " << sig6(m.cavity_hz.delta_fb)
        << " Hz\n";
    std::vector<std::complex<double>> ev(v.eigenvalues.begin(), v.eigenvalues.end());
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag(); });
    for (const auto& e : ev) out << "  lambda = " << sig6(e.real()) << " + " << sig6(e.imag()) << "i\n";
    for (const auto& w : m.warnings) out << "warning: " << w << '\n';
    return stable ? kOk : kUnstable;
  }
  // Stability scan: no correlation measures, just the verdict per point.
  MeasureSelection none;
  none.log_negativity = none.steering = none.steering_asymmetry = none.discord = false;
  SweepTable table;
  table.axes = cfg.sweep.axes;
  table.selection = none;
  std::size_t total = 1;
  for (const auto& a : table.axes) {
    a.check();
    total *= static_cast<std::size_t>(a.count);
  }
  table.rows.resize(total);
  std::size_t stable = 0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    SweepRow& row = table.rows[idx];
    SystemParams p = cfg.system;
    row.coords.resize(table.axes.size());
    std::size_t rem = idx;
    for (std::size_t d = table.axes.size(); d-- > 0;) {
      const auto cnt = static_cast<std::size_t>(table.axes[d].count);
      row.coords[d] = table.axes[d].value(static_cast<int>(rem % cnt));
      rem /= cnt;
    }
    for (std::size_t d = 0; d < table.axes.size(); ++d) table.axes[d].apply(p, row.coords[d]);
        try {
      const LinearizedModel m = build_model(p);
      const StabilityVerdict v = check_stability(m.gamma_matrix);
      row.report.stable = v.stable && !m.unstable_by_construction;
      row.report.max_real_part = v.max_real_part;
    } catch (const Error& e) {
      row.report.pipeline_error = true;
      row.report.notes.push_back(e.what());
    }
    stable += row.report.stable ? 1 : 0;
  }
  out << "grid: " << total << " points, stable fraction: " << sig6(double(stable) / double(total)) << '\n';
  if (!cfg.output.path.empty()) {
    write_table(table, cfg.output.format, cfg.output.path);
    out << "wrote " << cfg.output.path << '\n';
  }
  return kOk;
}

inline int cmd_validate(const std::string& mutate, std::ostream& out) {
  SigmaFn fn = two_mode_sigma_tilde_min;
  if (mutate == "sigma-half")
    fn = mutated_sigma_half;
  else if (!mutate.empty())
    throw Error(ErrorKind::ConfigError, "unknown mutation '" + mutate + "' (expected sigma-half)");
  bool all = true;
  for (const auto& c : run_validation(fn)) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  out << (all ? "all checks passed" : "validation FAILED") << '\n';
  return all ? kOk : kValidationFailed;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Steady-state correlations of a feedback cavity-magnomechanical system"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config, "config file (TOML subset)");
    sub->add_option("--axis", opt.axes, "sweep axis name:start:stop:count (repeatable, overrides config axes)");
    sub->add_option("--out", opt.out, "output path");
    sub->add_option("--format", opt.format, "csv or json");
    sub->add_flag("--dump-config", opt.dump_config, "print the effective config and exit");
  };
  CLI::App* steady = app.add_subcommand("steady", "single-point correlation report");
  CLI::App* sweep = app.add_subcommand("sweep", "1-D/2-D parameter sweep");
  CLI::App* stability = app.add_subcommand("stability", "stability verdict or scan");
  CLI::App* validate = app.add_subcommand("validate", "built-in invariant suite");
  add_common(steady);
  add_common(sweep);
  add_common(stability);
  validate->add_option("--mutate", opt.mutate, "inject a known-bad formula (sigma-half) to exercise the suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (validate->parsed()) return cmd_validate(opt.mutate, out);
    const ConfigDocument cfg = resolve(opt);
    if (opt.dump_config) {
      out << dump_config(cfg);
      return kOk;
    }
    if (steady->parsed()) return cmd_steady(cfg, out);
    if (sweep->parsed()) return cmd_sweep(cfg, out);
    if (stability->parsed()) return cmd_stability(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::ConfigError:
      case ErrorKind::InvalidParams:
      case ErrorKind::BadAxis:
        return kConfigError;
      default:
        return kPipelineError;
    }
  }
  return kConfigError;
}

}  // namespace magnomech::cli
