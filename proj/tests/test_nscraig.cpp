#include <cmath>

#include <gtest/gtest.h>

#include "gsp/craig.hpp"
#include "gsp/dense.hpp"
#include "gsp/diagnostics.hpp"
#include "gsp/nscraig.hpp"
#include "test_support.hpp"

namespace gsp {
namespace {

using testing::dense_full_solve;
using testing::dense_schur;
using testing::random_system;
using testing::rel_diff;

TEST(NsCraig, SymmetricHandSystem) {
  const auto res = nscraig_solve(testing::hand_system(), SpdPreconditioner::identity(1));
  EXPECT_EQ(res.iterations, 1);
  EXPECT_EQ(res.termination, Termination::ExactTermination);
  EXPECT_DOUBLE_EQ(res.beta1, 1.0);
  EXPECT_NEAR(res.alphas[0], std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(res.p[0], -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(res.u[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(res.u[1], 1.0 / 3.0, 1e-15);
}

TEST(NsCraig, NonsymmetricHandSystem) {
  const auto res = nscraig_solve(testing::hand_nspd_system(), SpdPreconditioner::identity(1));
  EXPECT_EQ(res.iterations, 1);
  EXPECT_TRUE(succeeded(res.termination));
  EXPECT_NEAR(res.alphas[0], std::sqrt(2.6), 1e-14);
  EXPECT_NEAR(res.p[0], -1.0 / 2.6, 1e-14);
  EXPECT_NEAR(res.u[0], 0.4 / 2.6, 1e-14);
  EXPECT_NEAR(res.u[1], 1.2 / 2.6, 1e-14);
}

TEST(NsCraig, TightToleranceResidual) {
  const SaddleSystem sys = random_system(12, 5, 3, 0.5, 13);
  const auto n = random_diagonal_preconditioner(5, 2);
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  const auto res = nscraig_solve(sys, n, cfg);
  const Vector r = sys.b() - sys.a().multiply_transpose(res.u) + sys.c().multiply(res.p);
  const double explicit_rel = std::sqrt(r.dot(n.solve(r))) / res.beta1;
  EXPECT_LE(explicit_rel, 1e-10);
  EXPECT_NEAR(explicit_rel, res.history.back().res_rel, 1e-8);
}

TEST(NsCraig, ErrorEstimateExamples) {
  const std::vector<double> one{1.0};
  EXPECT_DOUBLE_EQ(nscraig_error_estimate(one, DenseMatrix::Identity(1, 1), 1, 1), 1.0);
  DenseMatrix l(2, 2);
  l << 1.0, 0.0, 0.5, 1.0;
  const std::vector<double> x{1.0, 1.0};
  EXPECT_NEAR(nscraig_error_estimate(x, l, 2, 1), 2.0 / 3.0, 1e-15);
  try {
    nscraig_error_estimate(x, l, 1, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientHistory);
  }

  const std::vector<double> zetas{0.3, -0.2, 0.1, -0.05};
  for (Index k = 1; k <= 4; ++k)
    EXPECT_NEAR(nscraig_error_estimate(zetas, DenseMatrix::Identity(4, 4), k, 1), craig_error_estimate(zetas, k, 1),
                1e-15);
}

TEST(NsCraig, MatchesCraigOnSymmetricInput) {
  const SaddleSystem sys = random_system(30, 12, 6, 0.0, 19);
  const auto n = random_diagonal_preconditioner(12, 8);
  SolverConfig cfg;
  cfg.tolerance = 1e-10;
  cfg.record_iterates = true;
  // nscraig orthogonalizes fully; reorthogonalized craig is the matching reference.
  cfg.reorthogonalize = true;
  const auto c = craig_solve(sys, n, cfg);
  const auto ns = nscraig_solve(sys, n, cfg);
  ASSERT_EQ(c.iterations, ns.iterations);
  for (Index k = 0; k < c.iterations; ++k) {
    EXPECT_LE(rel_diff(c.alphas[k], ns.alphas[k]), 1e-10);
    if (k + 1 < 12) EXPECT_LE(rel_diff(c.betas[k + 1], ns.betas[k + 1]), 1e-10);
    else EXPECT_LE(std::max(c.betas[k + 1], ns.betas[k + 1]), 1e-8 * c.beta1);
    EXPECT_NEAR(c.history[k].res_rel, ns.history[k].res_rel, 1e-10);
  }
  const auto dc = craig_residual_check(sys, n, c);
  const auto dn = nscraig_residual_check(sys, n, ns);
  ASSERT_EQ(dc.size(), dn.size());
  for (std::size_t i = 0; i < dc.size(); ++i) EXPECT_NEAR(dc[i].defect, dn[i].defect, 1e-10);

  const auto est = hessenberg_factors(ns);
  const Index k = est.steps();
  const DenseMatrix l = est.lower();
  EXPECT_LE((l - DenseMatrix::Identity(k, k)).norm(), 1e-8);
}

TEST(NsCraig, ResidualCheckOnConvergedRun) {
  const SaddleSystem sys = random_system(40, 16, 8, 0.5, 21);
  const auto n = random_diagonal_preconditioner(16, 3);
  SolverConfig cfg;
  cfg.tolerance = 1e-10;
  cfg.record_iterates = true;
  const auto res = nscraig_solve(sys, n, cfg);
  EXPECT_EQ(res.termination, Termination::Converged);
  for (const auto& d : nscraig_residual_check(sys, n, res)) {
    EXPECT_LE(d.defect, 1e-8) << "k=" << d.k;
    EXPECT_LE(d.upper_block, 1e-9 * d.upper_bound) << "k=" << d.k;
    ASSERT_TRUE(d.orthogonality);
    EXPECT_LE(*d.orthogonality, 1e-8 * res.beta1) << "k=" << d.k;
  }
}

TEST(NsCraig, FactoredAndDenseHessenbergSolvesAgree) {
  const SaddleSystem sys = random_system(40, 16, 8, 0.5, 27);
  const auto n = SpdPreconditioner::identity(16);
  SolverConfig cfg;
  cfg.tolerance = 1e-9;
  const auto fac = nscraig_solve(sys, n, cfg);
  cfg.hessenberg_solve = HessenbergSolve::Dense;
  const auto den = nscraig_solve(sys, n, cfg);
  ASSERT_EQ(fac.iterations, den.iterations);
  EXPECT_LE(rel_diff(fac.p, den.p), 1e-10);
  EXPECT_LE(rel_diff(fac.u, den.u), 1e-10);
}

TEST(NsCraig, ArnoldiAndFactorIdentities) {
  const SaddleSystem sys = random_system(24, 10, 5, 0.5, 33);
  const auto n = random_diagonal_preconditioner(10, 12);
  SolverConfig cfg;
  cfg.tolerance = 1e-300;
  cfg.max_iterations = 7;
  cfg.reorthogonalize = true;
  const auto res = nscraig_solve(sys, n, cfg);
  const auto f = hessenberg_factors(res);
  const Index k = f.steps();
  ASSERT_EQ(k, 7);
  for (Index j = 0; j + 1 < k; ++j) EXPECT_EQ(f.h(j + 1, j), res.betas[j + 1]);
  DenseMatrix q(10, k);
  for (Index j = 0; j < k; ++j) q.col(j) = res.right_basis[j];
  const DenseMatrix projected = q.transpose() * dense_schur(sys) * q;
  EXPECT_LE((f.h * f.b - projected).norm() / projected.norm(), 1e-8);
  const DenseMatrix l = f.lower();
  EXPECT_LE((f.h - f.b.transpose() * l.transpose()).norm() / f.h.norm(), 1e-10);
  EXPECT_LE((q.transpose() * n.dense() * q - DenseMatrix::Identity(k, k)).norm(), 1e-10);
}

TEST(NsCraig, EnergyIdentityAtFullLength) {
  const SaddleSystem sys = random_system(20, 8, 4, 0.5, 41);
  const auto n = random_diagonal_preconditioner(8, 4);
  SolverConfig cfg;
  cfg.tolerance = 1e-300;
  cfg.max_iterations = 8;
  cfg.reorthogonalize = true;
  cfg.record_iterates = true;
  const auto res = nscraig_solve(sys, n, cfg);
  ASSERT_EQ(res.iterations, 8);
  const auto f = hessenberg_factors(res);
  const Vector x = Eigen::Map<const Vector>(res.scalars.data(), 8);
  const Vector z = dense::solve_unit_lower_transpose(f.lower(), x);
  const auto [u, p] = dense_full_solve(sys);
  const double e0 = energy_error(sys, u, p, Vector::Zero(20), Vector::Zero(8));
  for (Index k = 0; k < 8; ++k) {
    double tail = 0.0;
    for (Index i = k + 1; i < 8; ++i) tail += x[i] * z[i];
    EXPECT_NEAR(energy_error(sys, u, p, res.u_iterates[k], res.p_iterates[k]), tail, 1e-7 * e0) << "k=" << k + 1;
  }
}

TEST(NsCraig, ErrorEstimateStopping) {
  const SaddleSystem sys = random_system(60, 30, 10, 0.5, 45);
  SolverConfig cfg;
  cfg.criterion = StoppingCriterion::ErrorEstimate;
  cfg.delay = 2;
  const auto res = nscraig_solve(sys, SpdPreconditioner::identity(30), cfg);
  EXPECT_EQ(res.termination, Termination::Converged);
  EXPECT_EQ(res.stop_reason, StopReason::ErrorEstimate);
  cfg.hessenberg_solve = HessenbergSolve::Dense;
  const auto den = nscraig_solve(sys, SpdPreconditioner::identity(30), cfg);
  EXPECT_EQ(den.iterations, res.iterations);
}

TEST(NsCraig, ZeroRhs) {
  try {
    nscraig_solve(testing::hand_nspd_system().with_rhs(Vector::Zero(1)), SpdPreconditioner::identity(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroRhs);
  }
}

}  // namespace
}  // namespace gsp
