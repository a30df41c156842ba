#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "gsp/dense.hpp"
#include "gsp/linops.hpp"

namespace gsp {
namespace {

SparseMatrix mat(Index rows, Index cols, std::initializer_list<double> values) {
  DenseMatrix d(rows, cols);
  auto it = values.begin();
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) d(i, j) = *it++;
  return SparseMatrix::from_dense(d);
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

DenseMatrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  DenseMatrix d(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) d(i, j) = dist(rng);
  return d;
}

TEST(SparseMatvec, HandExamples) {
  EXPECT_EQ(sparse_matvec(SparseMatrix::identity(2), vec({3, 4})), vec({3, 4}));
  EXPECT_EQ(sparse_matvec(mat(2, 2, {0, 1, 1, 0}), vec({3, 4})), vec({4, 3}));
  EXPECT_EQ(sparse_matvec(mat(2, 2, {1, 2, 3, 4}), vec({1, 1})), vec({3, 7}));
}

TEST(SparseMatvec, TransposeHandExamples) {
  EXPECT_EQ(sparse_matvec_transpose(SparseMatrix::identity(2), vec({5, 6})), vec({5, 6}));
  EXPECT_EQ(sparse_matvec_transpose(mat(2, 1, {1, 1}), vec({1, 1})), vec({2}));
  EXPECT_EQ(sparse_matvec_transpose(mat(2, 2, {1, 2, 3, 4}), vec({1, 0})), vec({1, 2}));
}

TEST(SparseMatvec, DimensionMismatchThrows) {
  try {
    sparse_matvec(SparseMatrix::identity(2), vec({1, 2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  EXPECT_THROW(sparse_matvec_transpose(mat(2, 1, {1, 1}), vec({1})), Error);
}

TEST(SparseMatvec, TransposeAgreesWithExplicitTranspose) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix d = random_matrix(9, 5, rng);
    for (Index i = 0; i < d.size(); ++i)
      if (i % 3 == 0) d.data()[i] = 0.0;
    const SparseMatrix a = SparseMatrix::from_dense(d);
    const Vector x = random_matrix(9, 1, rng).col(0);
    const Vector lhs = sparse_matvec_transpose(a, x);
    const Vector rhs = sparse_matvec(a.transpose(), x);
    EXPECT_LE((lhs - rhs).norm(), 1e-14 * std::max(1.0, rhs.norm()));
  }
}

TEST(SparseMatrix, RejectsDuplicateAndUnsortedColumns) {
  EXPECT_THROW(SparseMatrix(2, 2, {0, 2, 2}, {1, 1}, {1.0, 2.0}), Error);
  EXPECT_THROW(SparseMatrix(2, 2, {0, 2, 2}, {1, 0}, {1.0, 2.0}), Error);
  EXPECT_THROW(SparseMatrix(2, 2, {0, 1, 1}, {2}, {1.0}), Error);
  EXPECT_THROW(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), Error);
}

TEST(SparseMatrix, FromTripletsSumsDuplicates) {
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{1, 0, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}});
  EXPECT_EQ(a.nonzeros(), 2);
  EXPECT_EQ(a.coeff(1, 0), 4.0);
  EXPECT_EQ(a.coeff(0, 1), 2.0);
  EXPECT_EQ(a.coeff(0, 0), 0.0);
}

TEST(WeightedInner, HandExamples) {
  EXPECT_DOUBLE_EQ(weighted_inner(SparseMatrix::identity(2), vec({1, 1}), vec({1, 1})), 2.0);
  EXPECT_DOUBLE_EQ(weighted_inner(SparseMatrix::diagonal(vec({2, 3})), vec({1, 1}), vec({1, 1})), 5.0);
  const SparseMatrix w = SparseMatrix::diagonal(vec({4}));
  EXPECT_DOUBLE_EQ(weighted_inner(w, vec({1}), vec({1})), 4.0);
  EXPECT_DOUBLE_EQ(weighted_norm(w, vec({1})), 2.0);
  EXPECT_DOUBLE_EQ(weighted_inner(factorize_diagonal(vec({4})), vec({1}), vec({1})), 4.0);
}

TEST(WeightedInner, NanAndMismatchAreErrors) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    weighted_inner(SparseMatrix::identity(2), vec({1, nan}), vec({1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
  EXPECT_THROW(weighted_inner(SparseMatrix::identity(2), vec({1}), vec({1, 1})), Error);
}

TEST(WeightedInner, SymmetricAndBilinear) {
  std::mt19937_64 rng(11);
  const DenseMatrix g = random_matrix(6, 6, rng);
  const DenseMatrix spd = g * g.transpose() + 6.0 * DenseMatrix::Identity(6, 6);
  const SparseMatrix w = SparseMatrix::from_dense(spd);
  const Vector x = random_matrix(6, 1, rng).col(0);
  const Vector y = random_matrix(6, 1, rng).col(0);
  const Vector z = random_matrix(6, 1, rng).col(0);
  const double xy = weighted_inner(w, x, y);
  EXPECT_NEAR(xy, weighted_inner(w, y, x), 1e-13 * std::abs(xy));
  EXPECT_NEAR(weighted_inner(w, 2.0 * x + z, y), 2.0 * xy + weighted_inner(w, z, y), 1e-12 * (std::abs(xy) + 1));
}

TEST(Factorize, HandExamples) {
  const FactorizedOperator d = factorize(FactorKind::Diagonal, SparseMatrix::diagonal(vec({2, 4})));
  EXPECT_EQ(d.solve(vec({2, 4})), vec({1, 1}));

  const FactorizedOperator c = factorize(FactorKind::CholeskySpd, mat(2, 2, {4, 2, 2, 3}));
  EXPECT_LE((c.solve(vec({4, 2})) - vec({1, 0})).norm(), 1e-15);

  try {
    factorize(FactorKind::CholeskySpd, mat(2, 2, {1, 2, 2, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSpd);
  }
  try {
    factorize(FactorKind::LuGeneral, mat(2, 2, {1, 2, 2, 4}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Singular);
  }
}

TEST(Factorize, SolveInvertsApplyOnRandomRightHandSides) {
  std::mt19937_64 rng(5);
  const DenseMatrix g = random_matrix(12, 12, rng);
  const DenseMatrix spd = g * g.transpose() + 12.0 * DenseMatrix::Identity(12, 12);
  const DenseMatrix gen = g + 12.0 * DenseMatrix::Identity(12, 12);
  const FactorizedOperator ops[] = {factorize(FactorKind::CholeskySpd, spd), factorize(FactorKind::LuGeneral, gen),
                                    factorize_diagonal(spd.diagonal())};
  for (const auto& op : ops) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vector b = random_matrix(12, 1, rng).col(0);
      EXPECT_LE((op.apply(op.solve(b)) - b).norm(), 1e-10 * b.norm());
      EXPECT_LE((op.solve(op.apply(b)) - b).norm(), 1e-12 * b.norm() * 10);
    }
  }
}

TEST(SpdPreconditioner, SymmetricAndPositiveOnProbes) {
  std::mt19937_64 rng(8);
  const DenseMatrix g = random_matrix(7, 7, rng);
  const SpdPreconditioner n = SpdPreconditioner::from_matrix(SparseMatrix::from_dense(g * g.transpose() + DenseMatrix::Identity(7, 7)));
  const double nnorm = n.dense().norm();
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = random_matrix(7, 1, rng).col(0);
    const Vector y = random_matrix(7, 1, rng).col(0);
    EXPECT_LE(std::abs(x.dot(n.apply(y)) - y.dot(n.apply(x))), 1e-12 * x.norm() * y.norm() * nnorm);
    EXPECT_GT(x.dot(n.apply(x)), 0.0);
  }
  EXPECT_THROW(SpdPreconditioner::diagonal(vec({1, -1})), Error);
  EXPECT_THROW(SpdPreconditioner(factorize(FactorKind::LuGeneral, mat(1, 1, {2}))), Error);
}

TEST(CheckedSqrt, ClampsNoiseAndRejectsLargeNegatives) {
  EXPECT_EQ(checked_sqrt(4.0, 1.0), 2.0);
  EXPECT_EQ(checked_sqrt(-1e-14, 1.0), 0.0);
  EXPECT_THROW(checked_sqrt(-1e-3, 1.0), Error);
}

TEST(SpsdFactor, HandExamples) {
  const SpsdFactor d = spsd_factor(SparseMatrix::diagonal(vec({2, 0})));
  ASSERT_EQ(d.rank, 1);
  EXPECT_NEAR(d.f(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(std::abs(d.e(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(d.e(0, 1), 0.0, 1e-14);

  const SpsdFactor i = spsd_factor(SparseMatrix::identity(2));
  EXPECT_EQ(i.rank, 2);
  EXPECT_LE((i.e.transpose() * i.f * i.e - DenseMatrix::Identity(2, 2)).norm(), 1e-14);

  const SpsdFactor ones = spsd_factor(mat(2, 2, {1, 1, 1, 1}));
  ASSERT_EQ(ones.rank, 1);
  EXPECT_NEAR(ones.f(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(std::abs(ones.e(0, 0)), 1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(ones.e(0, 0), ones.e(0, 1), 1e-14);
}

TEST(SpsdFactor, Errors) {
  try {
    spsd_factor(mat(2, 2, {1, 0.5, 0, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Asymmetric);
  }
  try {
    spsd_factor(mat(2, 2, {1, 2, 2, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSpsd);
  }
}

TEST(SpsdFactor, RoundTripOnRandomRanks) {
  std::mt19937_64 rng(21);
  const Index n = 8;
  for (Index l = 1; l <= n; ++l) {
    const DenseMatrix e = random_matrix(l, n, rng);
    const DenseMatrix c = e.transpose() * e;
    const SparseMatrix cs = SparseMatrix::from_dense(0.5 * (c + c.transpose()));
    const SpsdFactor f = spsd_factor(cs);
    EXPECT_EQ(f.rank, l);
    const DenseMatrix back = f.e.transpose() * f.f * f.e;
    EXPECT_LE((back - cs.to_dense()).norm() / cs.to_dense().norm(), 1e-10) << "rank " << l;
  }
}

TEST(Dense, HessenbergSolveMatchesDenseLu) {
  std::mt19937_64 rng(2);
  DenseMatrix h = random_matrix(6, 6, rng);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j + 1 < i; ++j) h(i, j) = 0.0;
  const Vector rhs = random_matrix(6, 1, rng).col(0);
  const Vector x = dense::solve_hessenberg(h, rhs);
  EXPECT_LE((h * x - rhs).norm(), 1e-12 * rhs.norm());
  try {
    dense::solve_hessenberg(DenseMatrix::Zero(2, 2), rhs.head(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Singular);
  }
}

TEST(Dense, BidiagonalSolvesAndLowerFactor) {
  const std::vector<double> alphas{2.0, 3.0, 4.0};
  const std::vector<double> betas{1.0, 0.5, 0.25, 0.1};
  const DenseMatrix b = dense::upper_bidiagonal(alphas, betas, 3);
  DenseMatrix expect(3, 3);
  expect << 2, 0.5, 0, 0, 3, 0.25, 0, 0, 4;
  EXPECT_EQ(b, expect);
  const Vector rhs = vec({1, 2, 3});
  EXPECT_LE((b * dense::solve_upper_bidiagonal(alphas, betas, rhs) - rhs).norm(), 1e-15);
  EXPECT_LE((b.transpose() * dense::solve_upper_bidiagonal_transpose(alphas, betas, rhs) - rhs).norm(), 1e-15);

  DenseMatrix l(3, 3);
  l << 1, 0, 0, 0.3, 1, 0, -0.2, 0.7, 1;
  const DenseMatrix h = b.transpose() * l.transpose();
  EXPECT_LE((dense::lower_factor_from_hessenberg(alphas, betas, h) - l).norm(), 1e-14);
  const Vector z = dense::solve_unit_lower_transpose(l, rhs);
  EXPECT_LE((l.transpose() * z - rhs).norm(), 1e-14);
}

}  // namespace
}  // namespace gsp
