#pragma once

// Built-in invariant suite behind `mm validate`.

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "magnomech/gaussian.hpp"
#include "magnomech/numerics.hpp"
#include "magnomech/pipeline.hpp"
#include "magnomech/random_states.hpp"
#include "magnomech/sweep.hpp"

namespace magnomech {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Sigma with the factor 2 inside the logarithm dropped. Only used to show
/// that the suite catches a broken formula (`mm validate --mutate sigma-half`).
inline double mutated_sigma_half(const CovarianceMatrix& sigma) { return 0.5 * two_mode_sigma_tilde_min(sigma); }

/// Physical, monogamy-respecting reference point: printed diffusion matrix,
/// kappa_fb derived from tau.
inline SystemParams validation_params() {
  SystemParams p;
  p.kappa_c_hz = p.kappa_m1_hz = p.kappa_m2_hz = 3e6;
  p.delta_c = {-1.0, DetuningUnit::OmegaD};
  p.delta_m2 = {-1.0, DetuningUnit::OmegaD};
  p.delta_m1_tilde = {0.9, DetuningUnit::OmegaD};
  p.tau = 0.1;
  return p;
}

/// Symplectic-spectrum route to the two-mode partially transposed Sigma,
/// independent of the determinant closed form.
inline double sigma_from_spectrum(const CovarianceMatrix& sigma) { return partial_transpose_sigma_min(sigma, 1); }

inline std::vector<CheckResult> run_validation(SigmaFn sigma_fn = two_mode_sigma_tilde_min) {
  std::vector<CheckResult> out;
  auto record = [&out](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };
  auto fmt = [](double v) { return format_sig9(v); };

  // Two-mode squeezed vacuum analytics.
  {
    bool ok = true;
    std::string detail;
    for (double r : {0.1, 0.5, 1.0}) {
      const CovarianceMatrix s = two_mode_squeezed_vacuum(r);
      const double sig = sigma_fn(s);
      const double en = log_negativity(s, sigma_fn);
      const double st = steering(s, SteeringDirection::AtoB);
      const double err = std::max({std::abs(sig - 0.5 * std::exp(-2 * r)), std::abs(en - 2 * r),
                                   std::abs(st - std::log(std::cosh(2 * r)))});
      if (err > 1e-12) {
        ok = false;
        detail += "r=" + fmt(r) + " err=" + fmt(err) + " ";
      }
    }
    record("tmsv_analytics", ok, ok ? "Sigma, E_N, S match closed forms to 1e-12" : detail);
  }

  // Vacuum: every measure exactly zero.
  {
    const CovarianceMatrix v2 = CovarianceMatrix::vacuum(2);
    const CovarianceMatrix v3 = CovarianceMatrix::vacuum(3);
    double worst = 0.0;
    try {
      worst = std::max({log_negativity(v2, sigma_fn), steering(v2, SteeringDirection::AtoB),
                        steering(v2, SteeringDirection::BtoA), steering_asymmetry(v2), geometric_discord(v2),
                        min_residual_contangle(v3, sigma_fn)});
      record("vacuum_zero", worst == 0.0, "max measure on vacuum = " + fmt(worst));
    } catch (const Error& e) {
      record("vacuum_zero", false, e.what());
    }
  }

  // Closed-form Sigma against the symplectic spectrum.
  {
    std::mt19937_64 rng(20240611);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const CovarianceMatrix s = random_physical_state(2, rng);
      worst = std::max(worst, std::abs(sigma_fn(s) - sigma_from_spectrum(s)));
    }
    record("sigma_closed_form_vs_spectrum", worst <= 1e-10, "max |diff| over 1000 states = " + fmt(worst));
  }

  // CKW monogamy on random three-mode states.
  {
    std::mt19937_64 rng(7);
    int violations = 0;
    for (int k = 0; k < 300; ++k) {
      const CovarianceMatrix v3 = random_physical_state(3, rng);
      for (int i = 0; i < 3; ++i) {
        try {
          residual_contangle(v3, i, sigma_fn);
        } catch (const Error&) {
          ++violations;
        }
      }
    }
    record("monogamy_random_states", violations == 0, std::to_string(violations) + " violations in 900 pivots");
  }

  // Pipeline: Lyapunov residual, physicality, monogamy, steering => entanglement.
  {
    SystemParams p = validation_params();
    MeasureSelection sel;
    sel.residual_contangle = true;
    sel.triples = {ModeTriple{}};
    const CorrelationReport rep = evaluate(p, sel);
    const bool have_state = rep.stable && rep.covariance.has_value();
    record("pipeline_lyapunov_residual", have_state && rep.lyapunov_residual && *rep.lyapunov_residual <= 1e-10,
           have_state ? "residual = " + fmt(rep.lyapunov_residual.value_or(NAN)) : "reference point not stable");
    if (have_state) {
      record("pipeline_physical", rep.covariance->is_physical(1e-9),
             "min eig(V + i Omega/2) = " + fmt(rep.covariance->uncertainty_margin()));
      int violations = 0;
      const CovarianceMatrix v3 = reduce(*rep.covariance, {kCavity, kMagnon1, kPhonon});
      for (int i = 0; i < 3; ++i) {
        try {
          residual_contangle(v3, i, sigma_fn);
        } catch (const Error&) {
          ++violations;
        }
      }
      record("pipeline_monogamy", violations == 0, std::to_string(violations) + " violating pivots");
      const CovarianceMatrix m12 = reduce(*rep.covariance, {kMagnon1, kMagnon2});
      const double s = std::max(steering(m12, SteeringDirection::AtoB), steering(m12, SteeringDirection::BtoA));
      const double e = log_negativity(m12, sigma_fn);
      record("steering_implies_entanglement", !(s > 1e-10) || e > 0.0, "S_max = " + fmt(s) + ", E = " + fmt(e));
    }
  }

  // Random stable Lyapunov systems.
  {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      Eigen::MatrixXd a(8, 8), b(8, 8);
      for (int i = 0; i < 64; ++i) {
        a.data()[i] = g(rng);
        b.data()[i] = g(rng);
      }
      const double shift = check_stability(a).max_real_part + 0.5;
      a -= shift * Eigen::MatrixXd::Identity(8, 8);
      worst = std::max(worst, solve_lyapunov(a, b * b.transpose()).residual);
    }
    record("lyapunov_random_residual", worst <= 1e-10, "max residual over 50 systems = " + fmt(worst));
  }

  // Determinism across worker counts.
  {
    SystemParams p = validation_params();
    std::vector<SweepAxis> axes{SweepAxis::parse("tau:0:0.45:10"), SweepAxis::parse("temperature_k:0:0.2:5")};
    MeasureSelection sel;
    sel.residual_contangle = true;
    sel.triples = {ModeTriple{}};
    std::ostringstream one, many;
    write_csv(run_sweep(p, axes, sel, 1), one);
    write_csv(run_sweep(p, axes, sel, 4), many);
    record("sweep_determinism", one.str() == many.str(), "1 vs 4 workers, " + std::to_string(one.str().size()) + " bytes");
  }
  return out;
}

}  // namespace magnomech
