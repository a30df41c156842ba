#include <cmath>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "gsp/craig.hpp"
#include "gsp/diagnostics.hpp"
#include "test_support.hpp"

namespace gsp {
namespace {

using testing::dense_full_solve;
using testing::dense_schur;
using testing::random_system;
using testing::rel_diff;

TEST(Craig, HandSystem) {
  const auto res = craig_solve(testing::hand_system(), SpdPreconditioner::identity(1));
  EXPECT_EQ(res.iterations, 1);
  EXPECT_EQ(res.termination, Termination::ExactTermination);
  EXPECT_DOUBLE_EQ(res.beta1, 1.0);
  EXPECT_NEAR(res.alphas[0], std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(res.scalars[0], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(res.u[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(res.u[1], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(res.p[0], -1.0 / 3.0, 1e-15);
  EXPECT_LE(res.betas[1], 1e-15);
}

TEST(Craig, EigenvectorRightHandSideTerminatesInOneStep) {
  const SaddleSystem base = random_system(8, 4, 2, 0.0, 31);
  const auto n = random_diagonal_preconditioner(4, 7);
  const DenseMatrix sninv = dense_schur(base) * n.dense().inverse();
  const Eigen::EigenSolver<DenseMatrix> eig(sninv);
  const Vector b = eig.eigenvectors().col(0).real().normalized();
  const SaddleSystem sys = base.with_rhs(b);
  const auto res = craig_solve(sys, n);
  EXPECT_EQ(res.iterations, 1);
  EXPECT_EQ(res.termination, Termination::ExactTermination);
  const auto [u, p] = dense_full_solve(sys);
  EXPECT_LE(relative_error(u, p, res.u, res.p), 1e-10);
}

TEST(Craig, ZeroCMatchesDirectSolveAndPlainCg) {
  const SaddleSystem sys = random_system(8, 4, 0, 0.0, 12);
  const auto n = random_diagonal_preconditioner(4, 2);
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  cfg.record_iterates = true;
  const auto res = craig_solve(sys, n, cfg);
  const auto [u, p] = dense_full_solve(sys);
  EXPECT_LE(rel_diff(res.p, p), 1e-9);
  EXPECT_LE(rel_diff(res.u, u), 1e-9);
  const auto cg = testing::textbook_pcg(dense_schur(sys), n.dense(), -sys.b(), res.iterations);
  ASSERT_GE(cg.size(), res.p_iterates.size());
  for (std::size_t k = 0; k < res.p_iterates.size(); ++k) EXPECT_LE(rel_diff(res.p_iterates[k], cg[k]), 1e-9);
}

TEST(Craig, ErrorEstimateExamples) {
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 1.0};
  const std::vector<double> pyth{3.0, 4.0};
  EXPECT_DOUBLE_EQ(craig_error_estimate(one, 1, 1), 1.0);
  EXPECT_DOUBLE_EQ(craig_error_estimate(two, 2, 1), 0.5);
  EXPECT_DOUBLE_EQ(craig_error_estimate(pyth, 2, 2), 1.0);
  try {
    craig_error_estimate(one, 1, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientHistory);
  }
}

TEST(Craig, Errors) {
  try {
    craig_solve(testing::hand_nspd_system(), SpdPreconditioner::identity(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongSolver);
  }
  try {
    craig_solve(testing::hand_system().with_rhs(Vector::Zero(1)), SpdPreconditioner::identity(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroRhs);
  }
  EXPECT_THROW(craig_solve(testing::hand_system(), SpdPreconditioner::identity(2)), Error);
  SolverConfig bad;
  bad.tolerance = 0.0;
  EXPECT_THROW(craig_solve(testing::hand_system(), SpdPreconditioner::identity(1), bad), Error);
}

TEST(Craig, ResidualCheckOnConvergedRun) {
  const SaddleSystem sys = random_system(40, 20, 10, 0.0, 5);
  const auto n = random_diagonal_preconditioner(20, 6);
  SolverConfig cfg;
  cfg.tolerance = 1e-10;
  cfg.record_iterates = true;
  const auto res = craig_solve(sys, n, cfg);
  EXPECT_EQ(res.termination, Termination::Converged);
  const auto defects = craig_residual_check(sys, n, res);
  ASSERT_EQ(defects.size(), res.history.size());
  for (const auto& d : defects) {
    EXPECT_LE(d.defect, 1e-8) << "k=" << d.k;
    EXPECT_LE(d.upper_block, 1e-9 * d.upper_bound) << "k=" << d.k;
  }
}

TEST(Craig, ResidualCheckHandAndCorruption) {
  SolverConfig cfg;
  cfg.record_iterates = true;
  const auto hand = craig_solve(testing::hand_system(), SpdPreconditioner::identity(1), cfg);
  const auto d = craig_residual_check(testing::hand_system(), SpdPreconditioner::identity(1), hand);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_LE(d[0].explicit_norm, 1e-15);
  EXPECT_LE(d[0].estimate, 1e-15);

  const SaddleSystem sys = random_system(20, 8, 4, 0.0, 8);
  const auto n = SpdPreconditioner::identity(8);
  auto res = craig_solve(sys, n, cfg);
  const std::size_t k = 2;
  res.history[k].scalar *= 2.0;
  const auto corrupted = craig_residual_check(sys, n, res);
  const double expected = std::abs(res.history[k].scalar / 2.0) * res.history[k].beta_next / res.beta1;
  EXPECT_NEAR(corrupted[k].defect, expected, 1e-8);
  EXPECT_GT(corrupted[k].defect, 1e-6);

  SolveResult bare = craig_solve(sys, n);
  try {
    craig_residual_check(sys, n, bare);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingHistory);
  }
}

TEST(Craig, EnergyIdentityAndMonotoneSchurError) {
  const SaddleSystem sys = random_system(20, 10, 5, 0.0, 44);
  const auto n = random_diagonal_preconditioner(10, 1);
  SolverConfig cfg;
  cfg.tolerance = 1e-300;
  cfg.max_iterations = 10;
  cfg.record_iterates = true;
  cfg.reorthogonalize = true;
  const auto res = craig_solve(sys, n, cfg);
  const auto [u, p] = dense_full_solve(sys);
  const DenseMatrix s = dense_schur(sys);
  const double e0 = energy_error(sys, u, p, Vector::Zero(20), Vector::Zero(10));
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < res.p_iterates.size(); ++k) {
    double tail = 0.0;
    for (std::size_t i = k + 1; i < res.scalars.size(); ++i) tail += res.scalars[i] * res.scalars[i];
    const double err = energy_error(sys, u, p, res.u_iterates[k], res.p_iterates[k]);
    EXPECT_NEAR(err, tail, 1e-8 * e0) << "k=" << k + 1;
    const Vector dp = p - res.p_iterates[k];
    const double snorm = std::sqrt(dp.dot(s * dp));
    EXPECT_LT(snorm, prev);
    prev = snorm;
  }
}

TEST(Craig, ReorthogonalizedResidualIsOrthogonalToBasis) {
  const SaddleSystem sys = random_system(30, 12, 6, 0.0, 9);
  const auto n = random_diagonal_preconditioner(12, 4);
  SolverConfig cfg;
  cfg.reorthogonalize = true;
  cfg.record_iterates = true;
  cfg.tolerance = 1e-10;
  const auto res = craig_solve(sys, n, cfg);
  for (const auto& d : craig_residual_check(sys, n, res)) {
    ASSERT_TRUE(d.orthogonality);
    EXPECT_LE(*d.orthogonality, 1e-8 * res.beta1);
  }
}

TEST(Craig, StoppingCriteria) {
  const SaddleSystem sys = random_system(60, 30, 15, 0.0, 3);
  const auto n = SpdPreconditioner::identity(30);
  SolverConfig cfg;
  cfg.criterion = StoppingCriterion::ErrorEstimate;
  cfg.delay = 3;
  cfg.tolerance = 1e-6;
  const auto est = craig_solve(sys, n, cfg);
  EXPECT_EQ(est.termination, Termination::Converged);
  EXPECT_EQ(est.stop_reason, StopReason::ErrorEstimate);
  ASSERT_TRUE(est.history.back().err_est);
  EXPECT_LT(std::sqrt(*est.history.back().err_est), 1e-6);
  EXPECT_FALSE(est.history[1].err_est);
  EXPECT_TRUE(est.history[2].err_est);

  cfg.criterion = StoppingCriterion::Either;
  const auto either = craig_solve(sys, n, cfg);
  EXPECT_NE(either.stop_reason, StopReason::None);
  EXPECT_LE(either.iterations, est.iterations);

  SolverConfig tight;
  tight.tolerance = 1e-30;
  tight.max_iterations = 5;
  const auto capped = craig_solve(sys, n, tight);
  EXPECT_EQ(capped.termination, Termination::MaxIterations);
  EXPECT_EQ(capped.iterations, 5);
  EXPECT_EQ(capped.history.size(), 5u);
}

TEST(Craig, HistoryMatchesScalars) {
  const SaddleSystem sys = random_system(30, 10, 5, 0.0, 10);
  const auto res = craig_solve(sys, SpdPreconditioner::identity(10));
  for (const auto& rec : res.history) {
    EXPECT_EQ(rec.res_rel, rec.beta_next * std::abs(rec.scalar) / res.beta1);
    EXPECT_EQ(rec.scalar, res.scalars[rec.k - 1]);
    if (rec.k > 1) {
      const double prev = res.scalars[rec.k - 2];
      EXPECT_NEAR(rec.scalar, -(res.betas[rec.k - 1] / res.alphas[rec.k - 1]) * prev, 1e-14 * std::abs(prev));
    }
  }
}

}  // namespace
}  // namespace gsp
