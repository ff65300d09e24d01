#pragma once

// One parameter point through the whole chain:
// model -> stability -> Lyapunov -> correlation measures.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "magnomech/errors.hpp"
#include "magnomech/gaussian.hpp"
#include "magnomech/model.hpp"
#include "magnomech/numerics.hpp"
#include "magnomech/params.hpp"

namespace magnomech {

/// Mode indices of the full four-mode state.
enum Mode : int { kCavity = 0, kMagnon1 = 1, kMagnon2 = 2, kPhonon = 3 };

inline constexpr std::array<std::string_view, 4> kModeNames{"c", "M1", "M2", "d"};

inline int parse_mode(std::string_view name) {
  for (int k = 0; k < 4; ++k)
    if (kModeNames[k] == name) return k;
  throw Error(ErrorKind::ConfigError, "unknown mode '" + std::string(name) + "' (expected c, M1, M2 or d)");
}

struct ModePair {
  int a = kMagnon1;
  int b = kMagnon2;
  std::string label() const { return std::string(kModeNames[a]) + std::string(kModeNames[b]); }
  bool operator==(const ModePair&) const = default;
};

struct ModeTriple {
  std::array<int, 3> modes{kCavity, kMagnon1, kPhonon};
  std::string label() const {
    std::string s;
    for (int m : modes) s += kModeNames[m];
    return s;
  }
  bool operator==(const ModeTriple&) const = default;
};

/// Which measures to compute, and on which mode pairs / triples.
struct MeasureSelection {
  bool log_negativity = true;
  bool steering = true;
  bool steering_asymmetry = true;
  bool discord = true;
  bool residual_contangle = false;
  std::vector<ModePair> pairs{ModePair{}};
  std::vector<ModeTriple> triples;

  bool any_pair_measure() const { return log_negativity || steering || steering_asymmetry || discord; }
  bool empty() const {
    return !(any_pair_measure() && !pairs.empty()) && !(residual_contangle && !triples.empty());
  }
  bool operator==(const MeasureSelection&) const = default;
};

struct PairReport {
  ModePair pair;
  std::optional<double> e_n;
  std::optional<double> s_ab;
  std::optional<double> s_ba;
  std::optional<double> s_asym;
  std::optional<double> d_g;

  static PairReport empty(ModePair p) {
    PairReport r;
    r.pair = p;
    return r;
  }
};

struct TripleReport {
  ModeTriple triple;
  std::optional<double> r_min;

  static TripleReport empty(ModeTriple t) {
    TripleReport r;
    r.triple = t;
    return r;
  }
};

struct CorrelationReport {
  bool stable = false;
  bool pipeline_error = false;  // model or solver failure (not instability)
  double max_real_part = 0.0;   // rad/s
  EffectiveCavity cavity_hz{};
  std::optional<double> lyapunov_residual;
  std::vector<PairReport> pairs;
  std::vector<TripleReport> triples;
  std::vector<std::string> notes;
  std::optional<CovarianceMatrix> covariance;  // full 8x8 V when stable
};

namespace detail {
template <class F>
std::optional<double> guarded(F&& f, std::vector<std::string>& notes, const std::string& what) {
  try {
    return f();
  } catch (const Error& e) {
    notes.push_back(what + ": " + e.what());
    return std::nullopt;
  }
}
}  // namespace detail

/// Measures on an already-solved four-mode covariance matrix.
inline void fill_measures(CorrelationReport& report, const CovarianceMatrix& v, const MeasureSelection& sel) {
  for (const ModePair& pair : sel.pairs) {
    PairReport pr = PairReport::empty(pair);
    if (sel.any_pair_measure()) {
      const CovarianceMatrix sigma = reduce(v, {pair.a, pair.b});
      const std::string tag = pair.label();
      auto& notes = report.notes;
      if (sel.log_negativity) pr.e_n = detail::guarded([&] { return log_negativity(sigma); }, notes, "E_" + tag);
      if (sel.steering) {
        pr.s_ab = detail::guarded([&] { return steering(sigma, SteeringDirection::AtoB); }, notes, "S_" + tag);
        pr.s_ba = detail::guarded([&] { return steering(sigma, SteeringDirection::BtoA); }, notes, "S_" + tag);
      }
      if (sel.steering_asymmetry)
        pr.s_asym = detail::guarded([&] { return steering_asymmetry(sigma); }, notes, "SASYM_" + tag);
      if (sel.discord) pr.d_g = detail::guarded([&] { return geometric_discord(sigma); }, notes, "DG_" + tag);
    }
    report.pairs.push_back(pr);
  }
  if (sel.residual_contangle) {
    for (const ModeTriple& t : sel.triples) {
      TripleReport tr = TripleReport::empty(t);
      tr.r_min = detail::guarded(
          [&] {
            const CovarianceMatrix v3 = reduce(v, std::span<const int>(t.modes));
            return min_residual_contangle(v3);
          },
          report.notes, "RMIN_" + t.label());
      report.triples.push_back(tr);
    }
  }
}

/// Evaluates one parameter point. Per-point failures never throw: they are
/// recorded in `notes`, with the affected measures left empty.
inline CorrelationReport evaluate(const SystemParams& params, const MeasureSelection& sel) {
  CorrelationReport report;
  auto empty_rows = [&] {
    for (const ModePair& p : sel.pairs) report.pairs.push_back(PairReport::empty(p));
    if (sel.residual_contangle)
      for (const ModeTriple& t : sel.triples) report.triples.push_back(TripleReport::empty(t));
  };

  LinearizedModel model;
  try {
    model = build_model(params);
  } catch (const Error& e) {
    report.pipeline_error = true;
    report.notes.push_back(e.what());
    empty_rows();
    return report;
  }
  report.cavity_hz = model.cavity_hz;
  for (const auto& w : model.warnings) report.notes.push_back("warning: " + w);

  try {
    const StabilityVerdict verdict = check_stability(model.gamma_matrix);
    report.max_real_part = verdict.max_real_part;
    report.stable = verdict.stable && !model.unstable_by_construction;
  } catch (const Error& e) {
    report.pipeline_error = true;
    report.notes.push_back(e.what());
  }
  if (!report.stable) {
    if (!report.pipeline_error) report.notes.push_back("unstable/marginal");
    empty_rows();
    return report;
  }

  try {
    const LyapunovSolution sol = solve_lyapunov(model.gamma_matrix, model.f_matrix);
    report.lyapunov_residual = sol.residual;
    report.covariance = CovarianceMatrix(sol.v_matrix);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularSystem) {
      report.stable = false;
      report.notes.push_back("unstable/marginal");
    } else {
      report.pipeline_error = true;
    }
    report.notes.push_back(e.what());
    empty_rows();
    return report;
  }

  fill_measures(report, *report.covariance, sel);
  return report;
}

}  // namespace magnomech
