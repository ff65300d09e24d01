#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "magnomech/gaussian.hpp"
#include "magnomech/pipeline.hpp"
#include "magnomech/random_states.hpp"
#include "oracles.hpp"

using namespace magnomech;

namespace {

// Symplectic spectrum of a two-mode state straight from the definition:
// moduli of the eigenvalues of i Omega V~ after flipping p_B.
double sigma_min_direct(const CovarianceMatrix& s) {
  Eigen::Matrix4d vt = s.data();
  vt.row(3) *= -1.0;
  vt.col(3) *= -1.0;
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = omega(2, 3) = 1.0;
  omega(1, 0) = omega(3, 2) = -1.0;
  return (omega * vt).eigenvalues().cwiseAbs().minCoeff();
}

CovarianceMatrix swap_modes(const CovarianceMatrix& s) {
  Eigen::Matrix4d p = Eigen::Matrix4d::Zero();
  p(0, 2) = p(1, 3) = p(2, 0) = p(3, 1) = 1.0;
  return CovarianceMatrix(p * s.data() * p.transpose());
}

}  // namespace

TEST(Reduce, PicksBlocksInOrder) {
  Eigen::MatrixXd v(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) v(i, j) = (i == j ? 10.0 : 0.0) + 0.1 * (i + j);
  const CovarianceMatrix c(v);
  const CovarianceMatrix r = reduce(c, {2, 0});
  EXPECT_EQ(r.n_modes(), 2);
  EXPECT_EQ(r.block(0, 0), c.block(2, 2));
  EXPECT_EQ(r.block(0, 1), c.block(2, 0));
  EXPECT_EQ(r.block(1, 1), c.block(0, 0));
}

TEST(Reduce, Composes) {
  std::mt19937_64 rng(11);
  const CovarianceMatrix v = random_physical_state(4, rng);
  const CovarianceMatrix once = reduce(v, {3, 1});
  const CovarianceMatrix twice = reduce(reduce(v, {0, 1, 3}), {2, 1});
  EXPECT_EQ(once.data(), twice.data());
}

TEST(Reduce, OutOfRange) {
  const CovarianceMatrix v = CovarianceMatrix::vacuum(2);
  try {
    reduce(v, {0, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
}

TEST(Covariance, RejectsAsymmetricMatrix) {
  Eigen::MatrixXd v = 0.5 * Eigen::MatrixXd::Identity(4, 4);
  v(0, 1) = 0.1;
  EXPECT_THROW(CovarianceMatrix{v}, Error);
}

TEST(Covariance, VacuumSaturatesUncertainty) {
  EXPECT_NEAR(CovarianceMatrix::vacuum(3).uncertainty_margin(), 0.0, 1e-15);
  Eigen::MatrixXd squeezed = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  squeezed(0, 0) = 0.2;  // 0.2 * 0.5 < 1/4
  EXPECT_FALSE(CovarianceMatrix(squeezed).is_physical());
}

TEST(TwoModeSqueezed, AnalyticValues) {
  for (double r : {0.1, 0.5, 1.0}) {
    const CovarianceMatrix s = two_mode_squeezed_vacuum(r);
    EXPECT_NEAR(two_mode_sigma_tilde_min(s), 0.5 * std::exp(-2 * r), 1e-12);
    EXPECT_NEAR(log_negativity(s), 2 * r, 1e-12);
    EXPECT_NEAR(steering(s, SteeringDirection::AtoB), std::log(std::cosh(2 * r)), 1e-12);
    EXPECT_NEAR(steering(s, SteeringDirection::BtoA), std::log(std::cosh(2 * r)), 1e-12);
    EXPECT_NEAR(steering_asymmetry(s), 0.0, 1e-12);
  }
}

TEST(Vacuum, EveryMeasureIsExactlyZero) {
  const CovarianceMatrix v = CovarianceMatrix::vacuum(2);
  EXPECT_EQ(log_negativity(v), 0.0);
  EXPECT_EQ(steering(v, SteeringDirection::AtoB), 0.0);
  EXPECT_EQ(steering(v, SteeringDirection::BtoA), 0.0);
  EXPECT_EQ(steering_asymmetry(v), 0.0);
  EXPECT_EQ(geometric_discord(v), 0.0);
  EXPECT_EQ(min_residual_contangle(CovarianceMatrix::vacuum(3)), 0.0);
}

TEST(Discord, ClosedFormValue) {
  // p = q = 1, w = 1/2: 1/(4 * 3/4) - 9 / (2 sqrt(13/4) + 2)^2 = 1/3 - 9 / (17 + 4 sqrt 13).
  const double expected = 1.0 / 3.0 - 9.0 / (17.0 + 4.0 * std::sqrt(13.0));
  EXPECT_NEAR(geometric_discord(StandardFormInvariants{1.0, 1.0, 0.5}), expected, 1e-15);
  EXPECT_NEAR(expected, 0.04691, 1e-5);
}

TEST(Discord, InvariantUnderLocalSymplectics) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const CovarianceMatrix s = random_physical_state(2, rng);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(4, 4);
    local.block(0, 0, 2, 2) = random_symplectic(1, rng);
    local.block(2, 2, 2, 2) = random_symplectic(1, rng);
    Eigen::MatrixXd moved = local * s.data() * local.transpose();
    moved = 0.5 * (moved + moved.transpose()).eval();
    const CovarianceMatrix t(moved);
    EXPECT_NEAR(geometric_discord(s), geometric_discord(t), 1e-9 * std::max(1.0, geometric_discord(s)));
    EXPECT_NEAR(log_negativity(s), log_negativity(t), 1e-9);
  }
}

TEST(Sigma, ClosedFormMatchesSpectrum) {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 1000; ++k) {
    const CovarianceMatrix s = random_physical_state(2, rng);
    ASSERT_NEAR(two_mode_sigma_tilde_min(s), sigma_min_direct(s), 1e-10) << "state " << k;
    ASSERT_NEAR(partial_transpose_sigma_min(s, 0), partial_transpose_sigma_min(s, 1), 1e-10);
  }
}

TEST(Measures, SymmetricUnderModeSwap) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 200; ++k) {
    const CovarianceMatrix s = random_physical_state(2, rng);
    const CovarianceMatrix t = swap_modes(s);
    EXPECT_NEAR(log_negativity(s), log_negativity(t), 1e-10);
    EXPECT_NEAR(geometric_discord(s), geometric_discord(t), 1e-10);
    EXPECT_NEAR(steering(s, SteeringDirection::AtoB), steering(t, SteeringDirection::BtoA), 1e-10);
    EXPECT_NEAR(steering_asymmetry(s), steering_asymmetry(t), 1e-10);
  }
}

TEST(Measures, SteeringImpliesEntanglement) {
  std::mt19937_64 rng(21);
  int steerable = 0;
  for (int k = 0; k < 2000; ++k) {
    const CovarianceMatrix s = random_physical_state(2, rng);
    const double st = std::max(steering(s, SteeringDirection::AtoB), steering(s, SteeringDirection::BtoA));
    if (st > 0.0) {
      ++steerable;
      EXPECT_GT(log_negativity(s), 0.0);
    }
  }
  EXPECT_GT(steerable, 50);
}

TEST(Measures, NonNegative) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 500; ++k) {
    const CovarianceMatrix s = random_physical_state(2, rng);
    EXPECT_GE(log_negativity(s), 0.0);
    EXPECT_GE(steering(s, SteeringDirection::AtoB), 0.0);
    EXPECT_GE(steering(s, SteeringDirection::BtoA), 0.0);
    EXPECT_GE(geometric_discord(s), 0.0);
  }
}

TEST(ThreeMode, SqueezedPairWithVacuum) {
  for (double r : {0.2, 0.7}) {
    const CovarianceMatrix v3 = direct_sum(two_mode_squeezed_vacuum(r), CovarianceMatrix::vacuum(1));
    EXPECT_NEAR(one_vs_two_mode_negativity(v3, 0), 2 * r, 1e-10);
    EXPECT_NEAR(one_vs_two_mode_negativity(v3, 1), 2 * r, 1e-10);
    EXPECT_NEAR(one_vs_two_mode_negativity(v3, 2), 0.0, 1e-12);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(residual_contangle(v3, i), 0.0, 1e-9);
    EXPECT_NEAR(min_residual_contangle(v3), 0.0, 1e-9);
  }
}

TEST(ThreeMode, SpectrumIsPairedAndPhysical) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const CovarianceMatrix v3 = random_physical_state(3, rng);
    EXPECT_TRUE(v3.is_physical());
    for (int i = 0; i < 3; ++i) EXPECT_NO_THROW(partial_transpose_sigma_min(v3, i));
  }
}

TEST(ThreeMode, MonogamyOnRandomStates) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 300; ++k) {
    const CovarianceMatrix v3 = random_physical_state(3, rng);
    for (int i = 0; i < 3; ++i) EXPECT_NO_THROW(residual_contangle(v3, i)) << "state " << k << " pivot " << i;
  }
}

TEST(ThreeMode, WrongSizeRejected) {
  EXPECT_THROW(residual_contangle(CovarianceMatrix::vacuum(2), 0), Error);
  try {
    residual_contangle(CovarianceMatrix::vacuum(3), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
}

TEST(Pipeline, ReferencePointIsPhysicalAndMonogamous) {
  MeasureSelection sel;
  sel.residual_contangle = true;
  sel.triples = {ModeTriple{}};
  for (double tau : {0.0, 0.1, 0.3, 0.45}) {
    const CorrelationReport r = evaluate(oracle::reference_params(tau), sel);
    ASSERT_TRUE(r.stable) << "tau=" << tau;
    ASSERT_TRUE(r.covariance.has_value());
    EXPECT_TRUE(r.covariance->is_physical(1e-9));
    EXPECT_LE(*r.lyapunov_residual, 1e-10);
    ASSERT_TRUE(r.triples[0].r_min.has_value());
    EXPECT_GE(*r.triples[0].r_min, 0.0);
    const PairReport& p = r.pairs[0];
    if (std::max(*p.s_ab, *p.s_ba) > 0.0) {
      EXPECT_GT(*p.e_n, 0.0);
    }
  }
}

TEST(Pipeline, DecoupledSystemHasNoCorrelations) {
  SystemParams p = oracle::reference_params(0.0);
  p.g1_hz = p.g2_hz = 0.0;
  p.g_eff_hz = 0.0;
  MeasureSelection sel;
  const CorrelationReport r = evaluate(p, sel);
  ASSERT_TRUE(r.stable);
  EXPECT_EQ(*r.pairs[0].e_n, 0.0);
  EXPECT_EQ(*r.pairs[0].s_ab, 0.0);
  EXPECT_EQ(*r.pairs[0].s_ba, 0.0);
  EXPECT_EQ(*r.pairs[0].d_g, 0.0);
}

TEST(Pipeline, UnstablePointHasEmptyMeasures) {
  const CorrelationReport r = evaluate(oracle::reference_params(0.6), MeasureSelection{});
  EXPECT_FALSE(r.stable);
  EXPECT_FALSE(r.pipeline_error);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_FALSE(r.pairs[0].e_n.has_value());
}
