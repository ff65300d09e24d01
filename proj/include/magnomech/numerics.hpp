#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "magnomech/errors.hpp"

namespace magnomech {

struct StabilityVerdict {
  bool stable = false;
  double max_real_part = 0.0;  // same units as the drift matrix
  double margin = 0.0;         // -max_real_part
  Eigen::VectorXcd eigenvalues;
};

/// Hurwitz test on the spectrum. The tolerance is relative to the spectral
/// radius: stable iff max Re(lambda) < -1e-9 * rho(A).
inline StabilityVerdict check_stability(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidParams, "drift matrix must be square");
  StabilityVerdict v;
  if (a.size() == 0) return v;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "eigenvalue iteration did not converge");
  v.eigenvalues = solver.eigenvalues();
  v.max_real_part = v.eigenvalues.real().maxCoeff();
  v.margin = -v.max_real_part;
  const double radius = v.eigenvalues.cwiseAbs().maxCoeff();
  v.stable = v.max_real_part < -1e-9 * radius;
  return v;
}

struct LyapunovSolution {
  Eigen::MatrixXd v_matrix;
  double residual = 0.0;  // ||A V + V A^T + F||_F / ||F||_F
};

inline double lyapunov_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& f, const Eigen::MatrixXd& v) {
  const double r = (a * v + v * a.transpose() + f).norm();
  const double scale = f.norm();
  return scale > 0.0 ? r / scale : r;
}

/// Solves A V + V A^T = -F by vectorization: (I (x) A + A (x) I) vec V = -vec F.
/// Dense and direct; intended for the small systems used here (n = 8 gives
/// a 64 x 64 solve).
inline LyapunovSolution solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& f) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || f.rows() != n || f.cols() != n)
    throw Error(ErrorKind::InvalidParams, "drift and diffusion matrices must be square and of equal size");

  const Eigen::Index nn = n * n;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nn, nn);
  // Column-major vec: vec(A V) = (I (x) A) vec V, vec(V A^T) = (A (x) I) vec V.
  for (Eigen::Index j = 0; j < n; ++j) k.block(j * n, j * n, n, n) += a;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (a(i, j) != 0.0) k.block(i * n, j * n, n, n).diagonal().array() += a(i, j);

  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(f.data(), nn);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
  lu.setThreshold(1e-13);
  if (lu.rank() < nn) throw Error(ErrorKind::SingularSystem, "Lyapunov operator is rank-deficient (marginal stability)");

  Eigen::VectorXd x = lu.solve(rhs);
  LyapunovSolution sol;
  sol.v_matrix = Eigen::Map<Eigen::MatrixXd>(x.data(), n, n);
  sol.v_matrix = 0.5 * (sol.v_matrix + sol.v_matrix.transpose()).eval();
  sol.residual = lyapunov_residual(a, f, sol.v_matrix);
  if (!(sol.residual <= 1e-8))
    throw Error(ErrorKind::ResidualTooLarge, "Lyapunov residual " + std::to_string(sol.residual));
  return sol;
}

}  // namespace magnomech
