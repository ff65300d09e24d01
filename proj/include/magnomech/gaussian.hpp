#pragma once

// Gaussian continuous-variable measures on covariance matrices.
//
// Convention: quadratures X = (a + a^dag)/sqrt(2), so the vacuum covariance
// matrix is I/2. All logarithms are natural; entropic measures are in nats.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "magnomech/errors.hpp"

namespace magnomech {

using Mat2 = Eigen::Matrix2d;

/// Real symmetric 2n x 2n matrix of quadrature second moments.
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;

  explicit CovarianceMatrix(Eigen::MatrixXd data) : data_(std::move(data)) {
    if (data_.rows() != data_.cols() || data_.rows() % 2 != 0)
      throw Error(ErrorKind::InvalidParams, "covariance matrix must be square with even dimension");
    const double scale = std::max(1.0, data_.cwiseAbs().maxCoeff());
    if ((data_ - data_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw Error(ErrorKind::InvalidParams, "covariance matrix must be symmetric");
  }

  static CovarianceMatrix vacuum(int n_modes) {
    return CovarianceMatrix(0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  int n_modes() const { return static_cast<int>(data_.rows() / 2); }
  const Eigen::MatrixXd& data() const { return data_; }

  Mat2 block(int i, int j) const { return data_.block<2, 2>(2 * i, 2 * j); }

  /// Smallest eigenvalue of the Hermitian matrix V + (i/2) Omega; physical
  /// states have it >= 0.
  double uncertainty_margin() const;

  bool is_physical(double tol = 1e-9) const { return uncertainty_margin() >= -tol; }

 private:
  Eigen::MatrixXd data_;
};

/// Direct sum of n copies of [[0, 1], [-1, 0]].
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

inline double CovarianceMatrix::uncertainty_margin() const {
  const Eigen::MatrixXcd h =
      data_.cast<std::complex<double>>() + std::complex<double>(0.0, 0.5) * symplectic_form(n_modes()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Sub-covariance matrix over the given modes, in the order given.
inline CovarianceMatrix reduce(const CovarianceMatrix& v, std::span<const int> modes) {
  const int n = v.n_modes();
  for (std::size_t a = 0; a < modes.size(); ++a) {
    if (modes[a] < 0 || modes[a] >= n)
      throw Error(ErrorKind::IndexOutOfRange, "mode index " + std::to_string(modes[a]) + " out of range");
    for (std::size_t b = 0; b < a; ++b)
      if (modes[a] == modes[b]) throw Error(ErrorKind::IndexOutOfRange, "duplicate mode index");
  }
  const auto m = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXd out(2 * m, 2 * m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) out.block<2, 2>(2 * a, 2 * b) = v.block(modes[a], modes[b]);
  return CovarianceMatrix(std::move(out));
}

inline CovarianceMatrix reduce(const CovarianceMatrix& v, std::initializer_list<int> modes) {
  return reduce(v, std::span<const int>(modes.begin(), modes.size()));
}

struct TwoModeBlocks {
  Mat2 p_block;
  Mat2 q_block;
  Mat2 w_block;
};

inline TwoModeBlocks two_mode_blocks(const CovarianceMatrix& sigma) {
  if (sigma.n_modes() != 2) throw Error(ErrorKind::InvalidParams, "expected a two-mode covariance matrix");
  return {sigma.block(0, 0), sigma.block(1, 1), sigma.block(0, 1)};
}

/// Local-symplectic invariants (p, q, w) of a two-mode state.
struct StandardFormInvariants {
  double p;
  double q;
  double w;
};

inline StandardFormInvariants standard_form_invariants(const CovarianceMatrix& sigma) {
  const TwoModeBlocks b = two_mode_blocks(sigma);
  const double det_p = b.p_block.determinant();
  const double det_q = b.q_block.determinant();
  if (!(det_p > 0.0) || !(det_q > 0.0)) throw Error(ErrorKind::NonPhysical, "local blocks must have positive determinant");
  return {std::sqrt(det_p), std::sqrt(det_q), std::sqrt(std::max(0.0, -b.w_block.determinant()))};
}

namespace detail {
inline double clamp_zero(double x) { return std::abs(x) <= 1e-14 ? 0.0 : x; }
}  // namespace detail

/// Smallest symplectic eigenvalue of the partially transposed two-mode state:
/// sqrt((chi - sqrt(chi^2 - 4 det sigma)) / 2), chi = det P + det Q - 2 det W.
inline double two_mode_sigma_tilde_min(const CovarianceMatrix& sigma) {
  const TwoModeBlocks b = two_mode_blocks(sigma);
  const double chi = b.p_block.determinant() + b.q_block.determinant() - 2.0 * b.w_block.determinant();
  const double det = sigma.data().determinant();
  double disc = chi * chi - 4.0 * det;
  if (disc < -1e-12 * std::max(1.0, chi * chi))
    throw Error(ErrorKind::NonPhysical, "negative discriminant in partial-transpose spectrum");
  disc = std::max(0.0, disc);
  const double sq = 0.5 * (chi - std::sqrt(disc));
  if (!(sq > 0.0)) throw Error(ErrorKind::NonPhysical, "non-positive partially transposed symplectic eigenvalue");
  return std::sqrt(sq);
}

/// Hook for swapping in an alternative two-mode Sigma (used by the
/// self-validation mutation test).
using SigmaFn = double (*)(const CovarianceMatrix&);

inline double negativity_from_sigma(double sigma_min) {
  return detail::clamp_zero(std::max(0.0, -std::log(2.0 * sigma_min)));
}

inline double log_negativity(const CovarianceMatrix& sigma, SigmaFn sigma_fn = two_mode_sigma_tilde_min) {
  return negativity_from_sigma(sigma_fn(sigma));
}

enum class SteeringDirection { AtoB, BtoA };

/// Gaussian steerability max(0, 1/2 ln(det P_A / (4 det sigma))), where P_A is
/// the local block of the steering party.
inline double steering(const CovarianceMatrix& sigma, SteeringDirection direction) {
  const TwoModeBlocks b = two_mode_blocks(sigma);
  const double det = sigma.data().determinant();
  if (!(det > 0.0)) throw Error(ErrorKind::NonPhysical, "covariance determinant must be positive");
  const double local = direction == SteeringDirection::AtoB ? b.p_block.determinant() : b.q_block.determinant();
  return detail::clamp_zero(std::max(0.0, 0.5 * std::log(local / (4.0 * det))));
}

inline double steering_asymmetry(const CovarianceMatrix& sigma) {
  return std::abs(steering(sigma, SteeringDirection::AtoB) - steering(sigma, SteeringDirection::BtoA));
}

/// Closed-form Gaussian geometric discord on the invariants (p, q, w).
inline double geometric_discord(const StandardFormInvariants& s) {
  const double pq = s.p * s.q;
  const double w2 = s.w * s.w;
  if (!(pq - w2 > 0.0)) throw Error(ErrorKind::NonPhysical, "pq - w^2 must be positive");
  const double root = 2.0 * std::sqrt(4.0 * pq - 3.0 * w2) + 2.0 * std::sqrt(pq);
  return detail::clamp_zero(1.0 / (4.0 * (pq - w2)) - 9.0 / (root * root));
}

inline double geometric_discord(const CovarianceMatrix& sigma) {
  return geometric_discord(standard_form_invariants(sigma));
}

/// Smallest symplectic eigenvalue of a multimode state after flipping the
/// momentum of `transposed_mode`, read from the +/- paired spectrum of
/// i Omega V~.
inline double partial_transpose_sigma_min(const CovarianceMatrix& v, int transposed_mode) {
  const int n = v.n_modes();
  if (transposed_mode < 0 || transposed_mode >= n) throw Error(ErrorKind::IndexOutOfRange, "transposed mode out of range");
  Eigen::MatrixXd vt = v.data();
  const Eigen::Index flip = 2 * transposed_mode + 1;
  vt.row(flip) *= -1.0;
  vt.col(flip) *= -1.0;

  const Eigen::MatrixXcd m = std::complex<double>(0.0, 1.0) * (symplectic_form(n) * vt).cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "symplectic spectrum did not converge");

  std::vector<double> re;
  const double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  for (const auto& ev : solver.eigenvalues()) {
    if (std::abs(ev.imag()) > 1e-9 * scale) throw Error(ErrorKind::NonPhysical, "symplectic spectrum is not real");
    re.push_back(ev.real());
  }
  std::sort(re.begin(), re.end());
  for (std::size_t k = 0; k < re.size() / 2; ++k)
    if (std::abs(re[k] + re[re.size() - 1 - k]) > 1e-9 * scale)
      throw Error(ErrorKind::NonPhysical, "symplectic spectrum is not +/- paired");

  double smallest = INFINITY;
  for (double x : re) smallest = std::min(smallest, std::abs(x));
  return smallest;
}

/// Logarithmic negativity of one mode against the remaining two of a
/// three-mode state.
inline double one_vs_two_mode_negativity(const CovarianceMatrix& v3, int transposed_mode) {
  if (v3.n_modes() != 3) throw Error(ErrorKind::InvalidParams, "expected a three-mode covariance matrix");
  return negativity_from_sigma(partial_transpose_sigma_min(v3, transposed_mode));
}

/// R^{i|jk} = E_{i|jk}^2 - E_{i|j}^2 - E_{i|k}^2 (contangle = squared log-negativity).
inline double residual_contangle(const CovarianceMatrix& v3, int i, SigmaFn sigma_fn = two_mode_sigma_tilde_min) {
  if (v3.n_modes() != 3) throw Error(ErrorKind::InvalidParams, "expected a three-mode covariance matrix");
  if (i < 0 || i > 2) throw Error(ErrorKind::IndexOutOfRange, "pivot mode out of range");
  const int j = (i + 1) % 3;
  const int k = (i + 2) % 3;
  const double e_i_jk = one_vs_two_mode_negativity(v3, i);
  const double e_ij = log_negativity(reduce(v3, {i, j}), sigma_fn);
  const double e_ik = log_negativity(reduce(v3, {i, k}), sigma_fn);
  const double r = e_i_jk * e_i_jk - e_ij * e_ij - e_ik * e_ik;
  if (r < -1e-9) throw Error(ErrorKind::MonogamyViolation, "residual contangle " + std::to_string(r) + " < 0");
  return std::max(0.0, detail::clamp_zero(r));
}

inline double min_residual_contangle(const CovarianceMatrix& v3, SigmaFn sigma_fn = two_mode_sigma_tilde_min) {
  double best = INFINITY;
  for (int i = 0; i < 3; ++i) best = std::min(best, residual_contangle(v3, i, sigma_fn));
  return best;
}

}  // namespace magnomech
