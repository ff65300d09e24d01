#pragma once

// Random physical Gaussian states and reference states, for validation and
// property tests.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "magnomech/gaussian.hpp"

namespace magnomech {

/// Two-mode squeezed vacuum with squeezing r on modes (0, 1).
inline CovarianceMatrix two_mode_squeezed_vacuum(double r) {
  const double c = 0.5 * std::cosh(2.0 * r);
  const double s = 0.5 * std::sinh(2.0 * r);
  Eigen::Matrix4d v;
  v << c, 0, s, 0,
       0, c, 0, -s,
       s, 0, c, 0,
       0, -s, 0, c;
  return CovarianceMatrix(v);
}

/// Direct sum of covariance matrices (mode order a then b).
inline CovarianceMatrix direct_sum(const CovarianceMatrix& a, const CovarianceMatrix& b) {
  const Eigen::Index na = a.data().rows();
  const Eigen::Index nb = b.data().rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(na + nb, na + nb);
  v.topLeftCorner(na, na) = a.data();
  v.bottomRightCorner(nb, nb) = b.data();
  return CovarianceMatrix(v);
}

/// Random symplectic matrix built from local rotations, single-mode
/// squeezers and beam splitters.
template <class Rng>
Eigen::MatrixXd random_symplectic(int n_modes, Rng& rng, double max_squeeze = 0.8) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> squeeze(-max_squeeze, max_squeeze);
  const int dim = 2 * n_modes;
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(dim, dim);
  auto local = [&](int k) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
    const double t = angle(rng);
    const double r = squeeze(rng);
    Eigen::Matrix2d rot;
    rot << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    Eigen::Matrix2d sq = Eigen::Vector2d(std::exp(-r), std::exp(r)).asDiagonal();
    m.block<2, 2>(2 * k, 2 * k) = sq * rot;
    return m;
  };
  auto splitter = [&](int a, int b) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
    const double t = angle(rng);
    const double c = std::cos(t);
    const double sn = std::sin(t);
    m.block<2, 2>(2 * a, 2 * a) = c * Eigen::Matrix2d::Identity();
    m.block<2, 2>(2 * b, 2 * b) = c * Eigen::Matrix2d::Identity();
    m.block<2, 2>(2 * a, 2 * b) = sn * Eigen::Matrix2d::Identity();
    m.block<2, 2>(2 * b, 2 * a) = -sn * Eigen::Matrix2d::Identity();
    return m;
  };
  for (int layer = 0; layer < 3; ++layer) {
    for (int k = 0; k < n_modes; ++k) s = local(k) * s;
    for (int a = 0; a < n_modes; ++a)
      for (int b = a + 1; b < n_modes; ++b) s = splitter(a, b) * s;
  }
  return s;
}

/// S diag(nu) S^T with symplectic eigenvalues nu_k >= 1/2.
template <class Rng>
CovarianceMatrix random_physical_state(int n_modes, Rng& rng, double max_squeeze = 0.8) {
  std::exponential_distribution<double> thermal(3.0);
  std::bernoulli_distribution pure(0.3);
  Eigen::VectorXd nu(2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    const double v = 0.5 + (pure(rng) ? 0.0 : thermal(rng));
    nu(2 * k) = v;
    nu(2 * k + 1) = v;
  }
  const Eigen::MatrixXd s = random_symplectic(n_modes, rng, max_squeeze);
  Eigen::MatrixXd v = s * nu.asDiagonal() * s.transpose();
  v = 0.5 * (v + v.transpose()).eval();
  return CovarianceMatrix(v);
}

}  // namespace magnomech
