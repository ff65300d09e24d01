#pragma once

// Linearized steady-state model: effective feedback quantities, thermal
// occupations, mean-field amplitudes, and the drift/diffusion matrices.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "magnomech/errors.hpp"
#include "magnomech/params.hpp"

namespace magnomech {

using Mat8 = Eigen::Matrix<double, 8, 8>;
using cdouble = std::complex<double>;

namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J / K
inline constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace constants

/// Quadrature ordering of the fluctuation vector.
enum Quadrature : int { kX = 0, kY, kX1, kY1, kX2, kY2, kQ, kP };

struct EffectiveCavity {
  double kappa_fb;
  double delta_fb;
};

/// Cavity decay and detuning dressed by the coherent feedback loop. Units
/// follow the inputs.
inline EffectiveCavity effective_cavity(double kappa_c, double delta_c, double tau, double phi) {
  return {kappa_c * (1.0 - 2.0 * tau * std::cos(phi)), delta_c - 2.0 * kappa_c * tau * std::sin(phi)};
}

/// Bose-Einstein occupation of a mode at frequency f (Hz) and temperature T (K).
inline double thermal_occupation(double omega_over_2pi, double temperature) {
  if (temperature <= 0.0) return 0.0;
  const double x = constants::hbar * constants::two_pi * omega_over_2pi / (constants::k_boltzmann * temperature);
  return 1.0 / std::expm1(x);
}

struct ThermalOccupations {
  double n_c = 0.0;
  double n_m1 = 0.0;
  double n_m2 = 0.0;
  double n_d = 0.0;
};

inline ThermalOccupations thermal_occupations(const SystemParams& p) {
  return {thermal_occupation(p.omega_c_hz, p.temperature_k), thermal_occupation(p.omega_m1_hz, p.temperature_k),
          thermal_occupation(p.omega_m2_hz, p.temperature_k), thermal_occupation(p.omega_d_hz, p.temperature_k)};
}

/// Effective cavity quantities in Hz, honouring a fixed kappa_fb override.
inline EffectiveCavity effective_cavity(const SystemParams& p) {
  const double delta_c = p.delta_c.hz(p.omega_d_hz);
  EffectiveCavity cav = effective_cavity(p.kappa_c_hz, delta_c, p.tau, p.phi_rad);
  if (p.kappa_fb_override_hz) cav.kappa_fb = *p.kappa_fb_override_hz;
  return cav;
}

struct SteadyAmplitudes {
  cdouble c_avg;
  cdouble m1_avg;
  cdouble m2_avg;
  double q_avg = 0.0;
  double p_avg = 0.0;
  double bare_delta_m1_hz = 0.0;  // Delta_M1 = Delta~_M1 - G0 <q>
  double detuning_ratio = 0.0;    // min |detuning| / max decay
  bool large_detuning_ok = true;  // detuning_ratio >= 10
};

/// Mean-field amplitudes in the large-detuning limit (decay rates dropped
/// against detunings). Requires derivation mode.
inline SteadyAmplitudes steady_amplitudes(const SystemParams& p) {
  if (!p.drive) throw Error(ErrorKind::InvalidParams, "steady_amplitudes needs derivation-mode drive parameters");
  const DriveParams& dr = *p.drive;
  const EffectiveCavity cav = effective_cavity(p);
  const double d_fb = cav.delta_fb;
  const double d1 = p.delta_m1_tilde.hz(p.omega_d_hz);
  const double d2 = p.delta_m2.hz(p.omega_d_hz);
  if (d_fb == 0.0 || d1 == 0.0 || d2 == 0.0)
    throw Error(ErrorKind::DegenerateDenominator, "detunings must be nonzero");

  const double g1 = p.g1_hz;
  const double g2 = p.g2_hz;
  const std::array<double, 3> terms{d_fb * d1 * d2, -g1 * g1 * d2, -g2 * g2 * d1};
  const double den = terms[0] + terms[1] + terms[2];
  const double largest =
      std::max({std::abs(terms[0]), std::abs(terms[1]), std::abs(terms[2])});
  if (std::abs(den) <= 1e-12 * largest)
    throw Error(ErrorKind::DegenerateDenominator, "mean-field denominator vanishes");

  constexpr cdouble i{0.0, 1.0};
  const cdouble feed = p.transmission() * dr.lambda_hz * std::exp(i * p.phi_rad);

  SteadyAmplitudes a;
  a.c_avg = (i * g1 * dr.rabi_hz - feed * d1) * d2 / den;
  a.m1_avg = -(g1 * a.c_avg + i * dr.rabi_hz) / d1;
  a.m2_avg = -g2 * a.c_avg / d2;
  a.q_avg = -dr.g0_hz * std::norm(a.m1_avg) / p.omega_d_hz;
  a.p_avg = 0.0;
  a.bare_delta_m1_hz = d1 - dr.g0_hz * a.q_avg;

  const double min_det = std::min({std::abs(d_fb), std::abs(d1), std::abs(d2)});
  const double max_decay = std::max({std::abs(cav.kappa_fb), p.kappa_m1_hz, p.kappa_m2_hz});
  a.detuning_ratio = max_decay > 0.0 ? min_det / max_decay : INFINITY;
  a.large_detuning_ok = a.detuning_ratio >= 10.0;
  return a;
}

/// G = i sqrt(2) G0 <M1>.
inline cdouble effective_coupling(double g0, cdouble m1_avg) {
  return cdouble{0.0, 1.0} * std::numbers::sqrt2 * g0 * m1_avg;
}

struct LinearizedModel {
  Mat8 gamma_matrix = Mat8::Zero();  // drift, angular units (rad/s)
  Mat8 f_matrix = Mat8::Zero();      // diffusion, angular units
  EffectiveCavity cavity_hz{};
  double coupling_hz = 0.0;  // real G used in the drift matrix
  ThermalOccupations occupations;
  std::optional<SteadyAmplitudes> amplitudes;
  bool unstable_by_construction = false;  // kappa_fb <= 0
  std::vector<std::string> warnings;
};

/// Drift and diffusion matrices over [X, Y, x1, y1, x2, y2, q, p].
inline LinearizedModel build_model(const SystemParams& params) {
  params.validate();
  LinearizedModel m;
  m.cavity_hz = effective_cavity(params);
  m.occupations = thermal_occupations(params);

  if (params.drive) {
    m.amplitudes = steady_amplitudes(params);
    const cdouble g = effective_coupling(params.drive->g0_hz, m.amplitudes->m1_avg);
    m.coupling_hz = g.real();
    if (std::abs(g.imag()) > 1e-6 * std::abs(g))
      m.warnings.push_back("effective coupling G has a non-negligible imaginary part; using Re(G)");
    if (!m.amplitudes->large_detuning_ok)
      m.warnings.push_back("large-detuning condition violated (ratio " +
                           std::to_string(m.amplitudes->detuning_ratio) + " < 10)");
  } else {
    m.coupling_hz = *params.g_eff_hz;
  }
  if (m.cavity_hz.kappa_fb <= 0.0) {
    m.unstable_by_construction = true;
    m.warnings.push_back("effective cavity decay kappa_fb <= 0");
  }

  const double w = constants::two_pi;
  const double k = w * m.cavity_hz.kappa_fb;
  const double dfb = w * m.cavity_hz.delta_fb;
  const double k1 = w * params.kappa_m1_hz;
  const double k2 = w * params.kappa_m2_hz;
  const double d1 = w * params.delta_m1_tilde.hz(params.omega_d_hz);
  const double d2 = w * params.delta_m2.hz(params.omega_d_hz);
  const double g1 = w * params.g1_hz;
  const double g2 = w * params.g2_hz;
  const double G = w * m.coupling_hz;
  const double wd = w * params.omega_d_hz;
  const double gd = w * params.gamma_d_hz;

  Mat8& A = m.gamma_matrix;
  A(kX, kX) = -k;   A(kX, kY) = dfb;  A(kX, kY1) = g1;   A(kX, kY2) = g2;
  A(kY, kX) = -dfb; A(kY, kY) = -k;   A(kY, kX1) = -g1;  A(kY, kX2) = -g2;
  A(kX1, kY) = g1;  A(kX1, kX1) = -k1; A(kX1, kY1) = d1; A(kX1, kQ) = -G;
  A(kY1, kX) = -g1; A(kY1, kX1) = -d1; A(kY1, kY1) = -k1;
  A(kX2, kY) = g2;  A(kX2, kX2) = -k2; A(kX2, kY2) = d2;
  A(kY2, kX) = -g2; A(kY2, kX2) = -d2; A(kY2, kY2) = -k2;
  A(kQ, kP) = wd;
  A(kP, kY1) = G;   A(kP, kQ) = -wd;   A(kP, kP) = -gd;

  const ThermalOccupations& n = m.occupations;
  const double nu = params.transmission();
  const double noise_rate =
      params.cavity_noise_rate == CavityNoiseRate::KappaFb ? m.cavity_hz.kappa_fb : params.kappa_c_hz;
  const double cav = w * noise_rate * (2.0 * n.n_c + 1.0) * nu * nu * (1.0 - params.tau) * (1.0 - params.tau);
  Mat8& F = m.f_matrix;
  F(kX, kX) = cav;
  F(kY, kY) = cav;
  F(kX1, kX1) = k1 * (2.0 * n.n_m1 + 1.0);
  F(kY1, kY1) = F(kX1, kX1);
  F(kX2, kX2) = k2 * (2.0 * n.n_m2 + 1.0);
  F(kY2, kY2) = F(kX2, kX2);
  F(kQ, kQ) = 0.0;
  F(kP, kP) = gd * (2.0 * n.n_d + 1.0);
  return m;
}

}  // namespace magnomech
