#pragma once

// Parameter sweeps over 1-D / 2-D grids and their tabular output.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "magnomech/errors.hpp"
#include "magnomech/params.hpp"
#include "magnomech/pipeline.hpp"

namespace magnomech {

/// Linear axis over one or more SystemParams fields. Several fields joined
/// with '+' are set to the same value (e.g. a diagonal Delta_c = Delta_M2 cut).
struct SweepAxis {
  std::string name;
  std::vector<std::string> fields;
  double start = 0.0;
  double stop = 1.0;
  int count = 2;

  double value(int k) const {
    if (k == count - 1) return stop;
    return start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1);
  }

  void apply(SystemParams& p, double v) const {
    for (const auto& f : fields) find_field(f)->set(p, v);
  }

  void check() const {
    if (fields.empty()) throw Error(ErrorKind::BadAxis, "axis has no field");
    for (const auto& f : fields)
      if (!find_field(f)) throw Error(ErrorKind::BadAxis, "'" + f + "' is not a numeric parameter");
    if (count < 2) throw Error(ErrorKind::BadAxis, "axis '" + name + "' needs at least 2 points");
    if (!(start != stop) || !std::isfinite(start) || !std::isfinite(stop))
      throw Error(ErrorKind::BadAxis, "axis '" + name + "' needs finite start != stop");
  }

  /// Parses "name:start:stop:count".
  static SweepAxis parse(std::string_view spec) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = spec.find(':', pos);
      parts.push_back(spec.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    if (parts.size() != 4) throw Error(ErrorKind::BadAxis, "axis spec must be name:start:stop:count, got '" + std::string(spec) + "'");
    auto number = [&](std::string_view s, auto& out) {
      const auto* end = s.data() + s.size();
      auto [ptr, ec] = std::from_chars(s.data(), end, out);
      if (ec != std::errc{} || ptr != end)
        throw Error(ErrorKind::BadAxis, "bad number '" + std::string(s) + "' in axis spec");
    };
    SweepAxis axis;
    axis.name = std::string(parts[0]);
    std::string_view names = parts[0];
    while (true) {
      const std::size_t plus = names.find('+');
      axis.fields.emplace_back(names.substr(0, plus));
      if (plus == std::string_view::npos) break;
      names.remove_prefix(plus + 1);
    }
    number(parts[1], axis.start);
    number(parts[2], axis.stop);
    number(parts[3], axis.count);
    axis.check();
    return axis;
  }

  std::string spec() const;

  bool operator==(const SweepAxis&) const = default;
};

/// Shortest decimal form that parses back to the same double.
inline std::string format_roundtrip(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Nine significant digits, '.' decimal separator regardless of locale.
inline std::string format_sig9(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  return std::string(buf, ptr);
}

inline std::string SweepAxis::spec() const {
  return name + ":" + format_roundtrip(start) + ":" + format_roundtrip(stop) + ":" + std::to_string(count);
}

struct SweepRow {
  std::vector<double> coords;
  CorrelationReport report;
};

struct SweepTable {
  std::vector<SweepAxis> axes;
  MeasureSelection selection;
  std::vector<SweepRow> rows;

  /// Measure columns in output order (axis columns and `stable` excluded).
  std::vector<std::string> measure_columns() const {
    std::vector<std::string> cols{"max_real_part"};
    for (const ModePair& p : selection.pairs) {
      const std::string ab = p.label();
      const std::string ba = std::string(kModeNames[p.b]) + std::string(kModeNames[p.a]);
      if (selection.log_negativity) cols.push_back("E_" + ab);
      if (selection.steering) {
        cols.push_back("S_" + ab);
        cols.push_back("S_" + ba);
      }
      if (selection.steering_asymmetry) cols.push_back("SASYM_" + ab);
      if (selection.discord) cols.push_back("DG_" + ab);
    }
    if (selection.residual_contangle)
      for (const ModeTriple& t : selection.triples) cols.push_back("RMIN_" + t.label());
    return cols;
  }

  /// Row values aligned with measure_columns().
  std::vector<std::optional<double>> measure_values(const SweepRow& row) const {
    std::vector<std::optional<double>> out{row.report.max_real_part};
    for (const PairReport& p : row.report.pairs) {
      if (selection.log_negativity) out.push_back(p.e_n);
      if (selection.steering) {
        out.push_back(p.s_ab);
        out.push_back(p.s_ba);
      }
      if (selection.steering_asymmetry) out.push_back(p.s_asym);
      if (selection.discord) out.push_back(p.d_g);
    }
    for (const TripleReport& t : row.report.triples) out.push_back(t.r_min);
    return out;
  }

  /// Column lookup by name; returns the values of that column for every row.
  std::vector<std::optional<double>> column(std::string_view name) const {
    const auto cols = measure_columns();
    const auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) throw Error(ErrorKind::InvalidParams, "no column '" + std::string(name) + "'");
    const auto idx = static_cast<std::size_t>(it - cols.begin());
    std::vector<std::optional<double>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(measure_values(r)[idx]);
    return out;
  }
};

/// Worker count from MM_THREADS (0 or unset = hardware concurrency).
inline unsigned default_worker_count() {
  unsigned n = 0;
  if (const char* env = std::getenv("MM_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

/// Runs the pipeline on every grid point. Rows are in row-major order over the
/// axes as declared (last axis fastest), independent of the worker count.
inline SweepTable run_sweep(const SystemParams& base, const std::vector<SweepAxis>& axes,
                            const MeasureSelection& selection, unsigned workers = 0, bool keep_states = false) {
  if (axes.size() > 2) throw Error(ErrorKind::BadAxis, "at most two sweep axes are supported");
  if (selection.empty()) throw Error(ErrorKind::InvalidParams, "measure selection is empty");
  for (const auto& a : axes) a.check();

  std::size_t total = 1;
  for (const auto& a : axes) total *= static_cast<std::size_t>(a.count);

  SweepTable table{axes, selection, std::vector<SweepRow>(total)};
  auto evaluate_index = [&](std::size_t idx) {
    SweepRow& row = table.rows[idx];
    SystemParams p = base;
    row.coords.resize(axes.size());
    std::size_t rem = idx;
    for (std::size_t d = axes.size(); d-- > 0;) {
      const int k = static_cast<int>(rem % static_cast<std::size_t>(axes[d].count));
      rem /= static_cast<std::size_t>(axes[d].count);
      row.coords[d] = axes[d].value(k);
    }
    try {
      for (std::size_t d = 0; d < axes.size(); ++d) axes[d].apply(p, row.coords[d]);
      row.report = evaluate(p, selection);
    } catch (const Error& e) {
      row.report = CorrelationReport{};
      row.report.pipeline_error = true;
      row.report.notes.push_back(e.what());
      for (const ModePair& pr : selection.pairs) row.report.pairs.push_back(PairReport::empty(pr));
      if (selection.residual_contangle)
        for (const ModeTriple& t : selection.triples) row.report.triples.push_back(TripleReport::empty(t));
    }
    if (!keep_states) row.report.covariance.reset();
  };

  if (workers == 0) workers = default_worker_count();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) evaluate_index(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) evaluate_index(i);
      });
    for (auto& t : pool) t.join();
  }
  return table;
}

inline void write_csv(const SweepTable& table, std::ostream& out) {
  std::string line;
  for (const auto& a : table.axes) line += a.name + ",";
  line += "stable";
  for (const auto& c : table.measure_columns()) line += "," + c;
  out << line << '\n';
  for (const auto& row : table.rows) {
    line.clear();
    for (double c : row.coords) line += format_sig9(c) + ",";
    line += row.report.stable ? "1" : "0";
    for (const auto& v : table.measure_values(row)) {
      line += ',';
      if (v) line += format_sig9(*v);
    }
    out << line << '\n';
  }
}

inline nlohmann::json table_to_json(const SweepTable& table) {
  using nlohmann::json;
  // Values are rounded through the 9-digit text form so JSON and CSV agree.
  auto num = [](double v) {
    const std::string text = format_sig9(v);
    double out = v;
    std::from_chars(text.data(), text.data() + text.size(), out);
    return out;
  };
  json axes = json::array();
  for (const auto& a : table.axes)
    axes.push_back({{"name", a.name}, {"fields", a.fields}, {"start", a.start}, {"stop", a.stop}, {"count", a.count}});
  const auto cols = table.measure_columns();
  json rows = json::array();
  for (const auto& row : table.rows) {
    json coords = json::array();
    for (double c : row.coords) coords.push_back(num(c));
    json values = json::object();
    const auto vals = table.measure_values(row);
    for (std::size_t i = 0; i < cols.size(); ++i) values[cols[i]] = vals[i] ? json(num(*vals[i])) : json(nullptr);
    rows.push_back({{"coords", coords}, {"stable", row.report.stable}, {"values", values}, {"notes", row.report.notes}});
  }
  json meta = {{"tool", "mm"}, {"row_count", table.rows.size()}, {"columns", cols}, {"units", "log-negativity, steering, contangle in nats; max_real_part in rad/s"}};
  return {{"meta", meta}, {"axes", axes}, {"rows", rows}};
}

inline void write_json(const SweepTable& table, std::ostream& out) { out << table_to_json(table).dump(2) << '\n'; }

enum class TableFormat { Csv, Json };

inline TableFormat parse_format(std::string_view s) {
  if (s == "csv") return TableFormat::Csv;
  if (s == "json") return TableFormat::Json;
  throw Error(ErrorKind::ConfigError, "unknown output format '" + std::string(s) + "' (expected csv or json)");
}

inline void write_table(const SweepTable& table, TableFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  if (format == TableFormat::Csv)
    write_csv(table, out);
  else
    write_json(table, out);
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path + "'");
}

}  // namespace magnomech
