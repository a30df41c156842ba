#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gsp/error.hpp"

namespace gsp {

using Index = std::ptrdiff_t;
using Vector = Eigen::VectorXd;
/// Column-major dense matrix; small factors (B_k, H_k, L_k) and oracles live here.
using DenseMatrix = Eigen::MatrixXd;

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row and duplicates are
/// rejected at construction. Products accumulate in row-major order with
/// ascending column index, so results are bit-reproducible.
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols);
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
               std::vector<Index> col_indices, std::vector<double> values);

  /// Sorts by (row, col); duplicate coordinates are summed.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
  /// Entries with |value| <= drop_tolerance are not stored.
  static SparseMatrix from_dense(const DenseMatrix& dense, double drop_tolerance = 0.0);
  static SparseMatrix identity(Index n);
  static SparseMatrix diagonal(const Vector& d);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nonzeros() const noexcept { return static_cast<Index>(values_.size()); }

  std::span<const Index> row_offsets() const noexcept { return row_offsets_; }
  std::span<const Index> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  Vector multiply(const Vector& x) const;
  Vector multiply_transpose(const Vector& x) const;
  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;
  std::vector<Triplet> triplets() const;

  /// Stored value at (i, j), zero when not stored.
  double coeff(Index i, Index j) const;
  double frobenius_norm() const;
  double max_abs() const;
  /// max |a_ij - a_ji| over stored entries, relative to max |a_ij|.
  double relative_asymmetry() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
  void validate() const;

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<double> values_;
};

Vector sparse_matvec(const SparseMatrix& a, const Vector& x);
Vector sparse_matvec_transpose(const SparseMatrix& a, const Vector& x);

enum class FactorKind { CholeskySpd, LuGeneral, Diagonal };

/// An exactly factorized square operator K offering both K*x and K^{-1}*b.
///
/// Dense factorizations are used throughout; inputs up to a few thousand
/// rows are the intended scale. Instances are immutable.
class FactorizedOperator {
public:
  Index dimension() const noexcept;
  FactorKind kind() const noexcept;

  Vector apply(const Vector& x) const;
  Vector solve(const Vector& b) const;
  /// Row permutation of the LU factor (identity for the other kinds).
  std::vector<Index> permutation() const;
  DenseMatrix dense() const;

private:
  struct Impl;
  explicit FactorizedOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;

  friend FactorizedOperator factorize(FactorKind, const DenseMatrix&);
  friend FactorizedOperator factorize_diagonal(const Vector&);
};

FactorizedOperator factorize(FactorKind kind, const DenseMatrix& k);
FactorizedOperator factorize(FactorKind kind, const SparseMatrix& k);
FactorizedOperator factorize_diagonal(const Vector& diagonal);

/// The SPD preconditioner N. Defines the N and N^{-1} inner products used by
/// every solver; backed by a Cholesky or a positive diagonal factor.
class SpdPreconditioner {
public:
  explicit SpdPreconditioner(FactorizedOperator op);

  static SpdPreconditioner identity(Index n);
  static SpdPreconditioner diagonal(const Vector& d);
  static SpdPreconditioner from_matrix(const SparseMatrix& n);

  Index dimension() const noexcept { return op_.dimension(); }
  Vector apply(const Vector& x) const { return op_.apply(x); }
  Vector solve(const Vector& b) const { return op_.solve(b); }
  const FactorizedOperator& op() const noexcept { return op_; }
  DenseMatrix dense() const { return op_.dense(); }

private:
  FactorizedOperator op_;
};

double weighted_inner(const FactorizedOperator& w, const Vector& x, const Vector& y);
double weighted_inner(const SparseMatrix& w, const Vector& x, const Vector& y);
double weighted_inner(const SpdPreconditioner& w, const Vector& x, const Vector& y);

/// sqrt(x^T W x); radicands in [-1e-12 |x|^2, 0) clamp to zero, below that throw.
double weighted_norm(const FactorizedOperator& w, const Vector& x);
double weighted_norm(const SparseMatrix& w, const Vector& x);
double weighted_norm(const SpdPreconditioner& w, const Vector& x);
/// Square root of a quadratic form under the same clamping rule.
double checked_sqrt(double radicand, double scale_sq);

struct SpsdFactor {
  DenseMatrix e;  ///< l x n
  DenseMatrix f;  ///< l x l diagonal, SPD
  Index rank = 0;
};

/// C = E^T F E from a dense symmetric eigendecomposition, keeping
/// eigenvalues above rank_tolerance * lambda_max.
SpsdFactor spsd_factor(const SparseMatrix& c, double rank_tolerance = 1e-12);

}  // namespace gsp
