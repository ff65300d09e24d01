#pragma once

// Physical parameters of the feedback cavity-magnomechanical system.
//
// Every frequency-like field is an ordinary frequency (omega / 2pi) in Hz.
// Conversion to angular units happens once, in build_model().

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "magnomech/errors.hpp"

namespace magnomech {

enum class DetuningUnit { Hz, OmegaD };

/// A detuning given either in Hz or as a multiple of the mechanical frequency.
struct Detuning {
  double value = 0.0;
  DetuningUnit unit = DetuningUnit::OmegaD;

  double hz(double omega_d_hz) const {
    return unit == DetuningUnit::Hz ? value : value * omega_d_hz;
  }
  bool operator==(const Detuning&) const = default;
};

/// Drive amplitudes for derivation mode, where G is computed from the
/// steady-state magnon amplitude instead of being supplied directly.
struct DriveParams {
  double g0_hz = 0.0;      // single-magnon magnomechanical coupling
  double rabi_hz = 0.0;    // magnon drive (Rabi frequency)
  double lambda_hz = 0.0;  // cavity drive through the beam splitter
  bool operator==(const DriveParams&) const = default;
};

/// Which rate multiplies the cavity entries of the diffusion matrix.
enum class CavityNoiseRate { KappaC, KappaFb };

struct SystemParams {
  double omega_c_hz = 10e9;
  double omega_m1_hz = 10e9;
  double omega_m2_hz = 10e9;
  double omega_d_hz = 10e6;
  double gamma_d_hz = 100.0;
  double kappa_c_hz = 10e6;
  double kappa_m1_hz = 10e6;
  double kappa_m2_hz = 10e6;
  double g1_hz = 3.2e6;
  double g2_hz = 2.6e6;

  // Exactly one of these is set.
  std::optional<double> g_eff_hz = 4.8e6;
  std::optional<DriveParams> drive;

  Detuning delta_c{-1.0, DetuningUnit::OmegaD};
  Detuning delta_m1_tilde{0.85, DetuningUnit::OmegaD};
  Detuning delta_m2{-1.0, DetuningUnit::OmegaD};

  double tau = 0.0;
  std::optional<double> nu;  // derived as sqrt(1 - tau^2) when absent
  double phi_rad = 0.0;
  double temperature_k = 0.01;

  // When set, the effective cavity decay is held at this value instead of
  // kappa_c (1 - 2 tau cos phi).
  std::optional<double> kappa_fb_override_hz;
  CavityNoiseRate cavity_noise_rate = CavityNoiseRate::KappaC;

  bool derivation_mode() const { return drive.has_value(); }

  double transmission() const { return nu ? *nu : std::sqrt(std::max(0.0, 1.0 - tau * tau)); }

  /// Throws Error(InvalidParams) on the first violated invariant.
  void validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidParams, msg); };
    auto positive = [&](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) fail(std::string(name) + " must be > 0");
    };
    positive(kappa_c_hz, "kappa_c_hz");
    positive(kappa_m1_hz, "kappa_m1_hz");
    positive(kappa_m2_hz, "kappa_m2_hz");
    // gamma_d = 0 is allowed: an undamped oscillator is reported as marginal.
    if (!(gamma_d_hz >= 0.0) || !std::isfinite(gamma_d_hz)) fail("gamma_d_hz must be >= 0");
    positive(omega_d_hz, "omega_d_hz");
    positive(omega_c_hz, "omega_c_hz");
    positive(omega_m1_hz, "omega_m1_hz");
    positive(omega_m2_hz, "omega_m2_hz");
    if (!(temperature_k >= 0.0) || !std::isfinite(temperature_k)) fail("temperature_k must be >= 0");
    if (!(tau >= 0.0 && tau <= 1.0)) fail("tau must lie in [0, 1]");
    if (nu) {
      if (*nu < 0.0 || std::abs(*nu * *nu + tau * tau - 1.0) > 1e-12)
        fail("nu must satisfy nu^2 + tau^2 = 1");
    }
    if (g_eff_hz.has_value() == drive.has_value())
      fail("exactly one of g_eff_hz or {g0_hz, rabi_hz, lambda_hz} must be supplied");
    if (g_eff_hz && !std::isfinite(*g_eff_hz)) fail("g_eff_hz must be finite");
    if (kappa_fb_override_hz && !std::isfinite(*kappa_fb_override_hz))
      fail("kappa_fb_hz must be finite");
  }

  bool operator==(const SystemParams&) const = default;
};

/// Numeric field access by config key name, used by sweep axes.
/// Detuning keys carry their unit in the suffix; setting one switches the
/// detuning to that unit.
struct FieldRef {
  std::string_view key;
  std::function<void(SystemParams&, double)> set;
  std::function<double(const SystemParams&)> get;
};

inline const std::vector<FieldRef>& numeric_fields() {
  using P = SystemParams;
  static const std::vector<FieldRef> fields = [] {
    std::vector<FieldRef> f;
    auto plain = [&f](std::string_view key, double P::*member) {
      f.push_back({key, [member](P& p, double v) { p.*member = v; },
                   [member](const P& p) { return p.*member; }});
    };
    auto detuning = [&f](std::string_view stem, Detuning P::*member) {
      for (auto unit : {DetuningUnit::Hz, DetuningUnit::OmegaD}) {
        // Keys are string literals with static storage, so views stay valid.
        std::string_view key;
        if (stem == "delta_c") key = unit == DetuningUnit::Hz ? "delta_c_hz" : "delta_c_omega_d_units";
        if (stem == "delta_m1_tilde")
          key = unit == DetuningUnit::Hz ? "delta_m1_tilde_hz" : "delta_m1_tilde_omega_d_units";
        if (stem == "delta_m2") key = unit == DetuningUnit::Hz ? "delta_m2_hz" : "delta_m2_omega_d_units";
        f.push_back({key, [member, unit](P& p, double v) { p.*member = Detuning{v, unit}; },
                     [member, unit](const P& p) {
                       const Detuning& d = p.*member;
                       if (d.unit == unit) return d.value;
                       return unit == DetuningUnit::Hz ? d.value * p.omega_d_hz : d.value / p.omega_d_hz;
                     }});
      }
    };
    plain("omega_c_hz", &P::omega_c_hz);
    plain("omega_m1_hz", &P::omega_m1_hz);
    plain("omega_m2_hz", &P::omega_m2_hz);
    plain("omega_d_hz", &P::omega_d_hz);
    plain("gamma_d_hz", &P::gamma_d_hz);
    plain("kappa_c_hz", &P::kappa_c_hz);
    plain("kappa_m1_hz", &P::kappa_m1_hz);
    plain("kappa_m2_hz", &P::kappa_m2_hz);
    plain("g1_hz", &P::g1_hz);
    plain("g2_hz", &P::g2_hz);
    // An explicit nu would contradict a swept tau, so it is dropped.
    f.push_back({"tau",
                 [](P& p, double v) {
                   p.tau = v;
                   p.nu.reset();
                 },
                 [](const P& p) { return p.tau; }});
    plain("phi_rad", &P::phi_rad);
    plain("temperature_k", &P::temperature_k);
    detuning("delta_c", &P::delta_c);
    detuning("delta_m1_tilde", &P::delta_m1_tilde);
    detuning("delta_m2", &P::delta_m2);
    f.push_back({"g_eff_hz", [](P& p, double v) { p.g_eff_hz = v; },
                 [](const P& p) { return p.g_eff_hz.value_or(0.0); }});
    f.push_back({"kappa_fb_hz", [](P& p, double v) { p.kappa_fb_override_hz = v; },
                 [](const P& p) { return p.kappa_fb_override_hz.value_or(0.0); }});
    auto drive = [&f](std::string_view key, double DriveParams::*member) {
      f.push_back({key,
                   [member](P& p, double v) {
                     if (!p.drive) throw Error(ErrorKind::BadAxis, "drive fields need derivation mode");
                     (*p.drive).*member = v;
                   },
                   [member](const P& p) { return p.drive ? (*p.drive).*member : 0.0; }});
    };
    drive("g0_hz", &DriveParams::g0_hz);
    drive("rabi_hz", &DriveParams::rabi_hz);
    drive("lambda_hz", &DriveParams::lambda_hz);
    return f;
  }();
  return fields;
}

inline const FieldRef* find_field(std::string_view key) {
  for (const auto& f : numeric_fields())
    if (f.key == key) return &f;
  return nullptr;
}

}  // namespace magnomech
