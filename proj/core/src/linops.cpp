#include "gsp/linops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <variant>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace gsp {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::NotSpd: return "not-spd";
    case ErrorCode::NotSpsd: return "not-spsd";
    case ErrorCode::Asymmetric: return "asymmetric";
    case ErrorCode::Singular: return "singular";
    case ErrorCode::ZeroRhs: return "zero-rhs";
    case ErrorCode::Breakdown: return "breakdown";
    case ErrorCode::WrongSolver: return "wrong-solver";
    case ErrorCode::DegenerateC: return "degenerate-c";
    case ErrorCode::InsufficientHistory: return "insufficient-history";
    case ErrorCode::MissingHistory: return "missing-history";
    case ErrorCode::RankRepair: return "rank-repair";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Usage: return "usage";
  }
  return "unknown";
}

namespace {

void require_dims(Index expected, Index actual, const char* what) {
  if (expected != actual) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected length " +
                                                  std::to_string(expected) + ", got " +
                                                  std::to_string(actual));
  }
}

void require_finite(const Vector& x, const char* what) {
  if (!x.allFinite()) throw Error(ErrorCode::InvalidInput, std::string(what) + " contains NaN/Inf");
}

}  // namespace

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), row_offsets_(static_cast<std::size_t>(rows) + 1, 0) {
  if (rows < 0 || cols < 0) throw Error(ErrorCode::InvalidInput, "negative matrix dimension");
}

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
                           std::vector<Index> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  validate();
}

void SparseMatrix::validate() const {
  if (rows_ < 0 || cols_ < 0) throw Error(ErrorCode::InvalidInput, "negative matrix dimension");
  if (static_cast<Index>(row_offsets_.size()) != rows_ + 1)
    throw Error(ErrorCode::InvalidInput, "row-offsets must have rows+1 entries");
  if (row_offsets_.front() != 0) throw Error(ErrorCode::InvalidInput, "row-offsets must start at 0");
  if (col_indices_.size() != values_.size())
    throw Error(ErrorCode::InvalidInput, "col-indices and values differ in length");
  if (row_offsets_.back() != static_cast<Index>(values_.size()))
    throw Error(ErrorCode::InvalidInput, "last row offset must equal the number of values");
  for (Index i = 0; i < rows_; ++i) {
    const Index begin = row_offsets_[i];
    const Index end = row_offsets_[i + 1];
    if (end < begin) throw Error(ErrorCode::InvalidInput, "row-offsets must be nondecreasing");
    for (Index p = begin; p < end; ++p) {
      const Index j = col_indices_[p];
      if (j < 0 || j >= cols_)
        throw Error(ErrorCode::InvalidInput, "column index out of range in row " + std::to_string(i));
      if (p > begin && col_indices_[p - 1] >= j)
        throw Error(ErrorCode::InvalidInput,
                    "column indices must strictly increase within row " + std::to_string(i));
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw Error(ErrorCode::InvalidInput, "triplet index out of range");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Index> offsets(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<Index> cols_out;
  std::vector<double> vals;
  cols_out.reserve(triplets.size());
  vals.reserve(triplets.size());
  Index last_row = -1;
  Index last_col = -1;
  for (const auto& t : triplets) {
    if (t.row == last_row && t.col == last_col) {
      vals.back() += t.value;
      continue;
    }
    cols_out.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[t.row + 1];
    last_row = t.row;
    last_col = t.col;
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense, double drop_tolerance) {
  std::vector<Index> offsets{0};
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index i = 0; i < dense.rows(); ++i) {
    for (Index j = 0; j < dense.cols(); ++j) {
      const double v = dense(i, j);
      if (std::abs(v) > drop_tolerance) {
        cols.push_back(j);
        vals.push_back(v);
      }
    }
    offsets.push_back(static_cast<Index>(vals.size()));
  }
  return SparseMatrix(dense.rows(), dense.cols(), std::move(offsets), std::move(cols),
                      std::move(vals));
}

SparseMatrix SparseMatrix::identity(Index n) { return diagonal(Vector::Ones(n)); }

SparseMatrix SparseMatrix::diagonal(const Vector& d) {
  const Index n = d.size();
  std::vector<Index> offsets(static_cast<std::size_t>(n) + 1);
  std::vector<Index> cols(static_cast<std::size_t>(n));
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    offsets[i] = i;
    cols[i] = i;
    vals[i] = d[i];
  }
  offsets[n] = n;
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::move(vals));
}

Vector SparseMatrix::multiply(const Vector& x) const {
  require_dims(cols_, x.size(), "sparse_matvec");
  Vector y(rows_);
  for (Index i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) sum += values_[p] * x[col_indices_[p]];
    y[i] = sum;
  }
  return y;
}

Vector SparseMatrix::multiply_transpose(const Vector& x) const {
  require_dims(rows_, x.size(), "sparse_matvec_transpose");
  Vector y = Vector::Zero(cols_);
  for (Index i = 0; i < rows_; ++i) {
    const double xi = x[i];
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) y[col_indices_[p]] += values_[p] * xi;
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Index> offsets(static_cast<std::size_t>(cols_) + 1, 0);
  for (Index j : col_indices_) ++offsets[j + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Index> next(offsets.begin(), offsets.end() - 1);
  std::vector<Index> cols(values_.size());
  std::vector<double> vals(values_.size());
  // Rows are visited in ascending order, so each transposed row comes out sorted.
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const Index dst = next[col_indices_[p]]++;
      cols[dst] = i;
      vals[dst] = values_[p];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols), std::move(vals));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(rows_, cols_);
  for (Index i = 0; i < rows_; ++i)
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) d(i, col_indices_[p]) = values_[p];
  return d;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (Index i = 0; i < rows_; ++i)
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
      out.push_back({i, col_indices_[p], values_[p]});
  return out;
}

double SparseMatrix::coeff(Index i, Index j) const {
  const auto begin = col_indices_.begin() + row_offsets_[i];
  const auto end = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

double SparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::relative_asymmetry() const {
  if (rows_ != cols_) return std::numeric_limits<double>::infinity();
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (Index i = 0; i < rows_; ++i)
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
      worst = std::max(worst, std::abs(values_[p] - coeff(col_indices_[p], i)));
  return worst / scale;
}

Vector sparse_matvec(const SparseMatrix& a, const Vector& x) { return a.multiply(x); }
Vector sparse_matvec_transpose(const SparseMatrix& a, const Vector& x) { return a.multiply_transpose(x); }

// ---------------------------------------------------------------------------
// FactorizedOperator

struct FactorizedOperator::Impl {
  FactorKind kind;
  DenseMatrix matrix;  // empty for the diagonal kind
  Vector diag;
  std::variant<std::monostate, Eigen::LLT<DenseMatrix>, Eigen::PartialPivLU<DenseMatrix>> factor;
};

Index FactorizedOperator::dimension() const noexcept {
  return impl_->kind == FactorKind::Diagonal ? impl_->diag.size() : impl_->matrix.rows();
}

FactorKind FactorizedOperator::kind() const noexcept { return impl_->kind; }

Vector FactorizedOperator::apply(const Vector& x) const {
  require_dims(dimension(), x.size(), "operator apply");
  if (impl_->kind == FactorKind::Diagonal) return impl_->diag.cwiseProduct(x);
  return impl_->matrix * x;
}

Vector FactorizedOperator::solve(const Vector& b) const {
  require_dims(dimension(), b.size(), "operator solve");
  switch (impl_->kind) {
    case FactorKind::Diagonal: return b.cwiseQuotient(impl_->diag);
    case FactorKind::CholeskySpd: return std::get<Eigen::LLT<DenseMatrix>>(impl_->factor).solve(b);
    case FactorKind::LuGeneral: return std::get<Eigen::PartialPivLU<DenseMatrix>>(impl_->factor).solve(b);
  }
  return {};
}

std::vector<Index> FactorizedOperator::permutation() const {
  std::vector<Index> perm(static_cast<std::size_t>(dimension()));
  std::iota(perm.begin(), perm.end(), Index{0});
  if (impl_->kind == FactorKind::LuGeneral) {
    const auto& p = std::get<Eigen::PartialPivLU<DenseMatrix>>(impl_->factor).permutationP();
    for (Index i = 0; i < p.size(); ++i) perm[i] = p.indices()[i];
  }
  return perm;
}

DenseMatrix FactorizedOperator::dense() const {
  if (impl_->kind == FactorKind::Diagonal) return impl_->diag.asDiagonal();
  return impl_->matrix;
}

FactorizedOperator factorize(FactorKind kind, const DenseMatrix& k) {
  if (k.rows() != k.cols()) throw Error(ErrorCode::DimensionMismatch, "factorize requires a square matrix");
  if (!k.allFinite()) throw Error(ErrorCode::InvalidInput, "matrix contains NaN/Inf");
  if (kind == FactorKind::Diagonal) return factorize_diagonal(k.diagonal());

  auto impl = std::make_shared<FactorizedOperator::Impl>();
  impl->kind = kind;
  impl->matrix = k;
  const double scale = k.cwiseAbs().maxCoeff();
  if (kind == FactorKind::CholeskySpd) {
    if (k.size() > 0 && (k - k.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw Error(ErrorCode::Asymmetric, "cholesky-spd requires a symmetric matrix");
    Eigen::LLT<DenseMatrix> llt(k);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotSpd, "nonpositive pivot in Cholesky factorization");
    impl->factor = std::move(llt);
  } else {
    Eigen::PartialPivLU<DenseMatrix> lu(k);
    const auto& packed = lu.matrixLU();
    const double pivot_floor = std::numeric_limits<double>::epsilon() * scale * static_cast<double>(k.rows());
    for (Index i = 0; i < packed.rows(); ++i) {
      if (!(std::abs(packed(i, i)) > pivot_floor))
        throw Error(ErrorCode::Singular, "zero pivot at row " + std::to_string(i) + " in LU factorization");
    }
    impl->factor = std::move(lu);
  }
  return FactorizedOperator(std::move(impl));
}

FactorizedOperator factorize(FactorKind kind, const SparseMatrix& k) {
  if (k.rows() > 5000) throw Error(ErrorCode::Unsupported, "dense factorization limited to dimension <= 5000");
  if (kind == FactorKind::Diagonal) {
    if (k.rows() != k.cols()) throw Error(ErrorCode::DimensionMismatch, "factorize requires a square matrix");
    Vector d(k.rows());
    for (Index i = 0; i < k.rows(); ++i) d[i] = k.coeff(i, i);
    return factorize_diagonal(d);
  }
  return factorize(kind, k.to_dense());
}

FactorizedOperator factorize_diagonal(const Vector& diagonal) {
  if (!diagonal.allFinite()) throw Error(ErrorCode::InvalidInput, "diagonal contains NaN/Inf");
  for (Index i = 0; i < diagonal.size(); ++i)
    if (diagonal[i] == 0.0) throw Error(ErrorCode::Singular, "zero diagonal entry " + std::to_string(i));
  auto impl = std::make_shared<FactorizedOperator::Impl>();
  impl->kind = FactorKind::Diagonal;
  impl->diag = diagonal;
  return FactorizedOperator(std::move(impl));
}

// ---------------------------------------------------------------------------
// SpdPreconditioner

SpdPreconditioner::SpdPreconditioner(FactorizedOperator op) : op_(std::move(op)) {
  switch (op_.kind()) {
    case FactorKind::CholeskySpd: break;
    case FactorKind::Diagonal: {
      const DenseMatrix d = op_.dense();
      if (d.diagonal().minCoeff() <= 0.0)
        throw Error(ErrorCode::NotSpd, "diagonal preconditioner must be positive");
      break;
    }
    case FactorKind::LuGeneral:
      throw Error(ErrorCode::NotSpd, "preconditioner must be cholesky-spd or diagonal");
  }
}

SpdPreconditioner SpdPreconditioner::identity(Index n) { return diagonal(Vector::Ones(n)); }

SpdPreconditioner SpdPreconditioner::diagonal(const Vector& d) {
  return SpdPreconditioner(factorize_diagonal(d));
}

SpdPreconditioner SpdPreconditioner::from_matrix(const SparseMatrix& n) {
  bool is_diagonal = n.rows() == n.cols();
  for (const auto& t : n.triplets())
    if (t.row != t.col && t.value != 0.0) is_diagonal = false;
  return SpdPreconditioner(factorize(is_diagonal ? FactorKind::Diagonal : FactorKind::CholeskySpd, n));
}

// ---------------------------------------------------------------------------
// weighted inner products

namespace {

double checked_dot(const Vector& x, const Vector& wy) {
  require_finite(x, "inner-product argument");
  require_finite(wy, "inner-product argument");
  return x.dot(wy);
}

}  // namespace

double weighted_inner(const FactorizedOperator& w, const Vector& x, const Vector& y) {
  require_dims(w.dimension(), x.size(), "weighted_inner");
  return checked_dot(x, w.apply(y));
}

double weighted_inner(const SparseMatrix& w, const Vector& x, const Vector& y) {
  require_dims(w.rows(), x.size(), "weighted_inner");
  return checked_dot(x, w.multiply(y));
}

double weighted_inner(const SpdPreconditioner& w, const Vector& x, const Vector& y) {
  return weighted_inner(w.op(), x, y);
}

double checked_sqrt(double radicand, double scale_sq) {
  if (std::isnan(radicand)) throw Error(ErrorCode::InvalidInput, "NaN in weighted norm");
  if (radicand >= 0.0) return std::sqrt(radicand);
  if (radicand >= -1e-12 * scale_sq) return 0.0;
  throw Error(ErrorCode::NotSpd, "negative radicand " + std::to_string(radicand) + " in weighted norm");
}

double weighted_norm(const FactorizedOperator& w, const Vector& x) {
  return checked_sqrt(weighted_inner(w, x, x), x.squaredNorm());
}

double weighted_norm(const SparseMatrix& w, const Vector& x) {
  return checked_sqrt(weighted_inner(w, x, x), x.squaredNorm());
}

double weighted_norm(const SpdPreconditioner& w, const Vector& x) { return weighted_norm(w.op(), x); }

// ---------------------------------------------------------------------------
// spsd_factor

SpsdFactor spsd_factor(const SparseMatrix& c, double rank_tolerance) {
  if (c.rows() != c.cols()) throw Error(ErrorCode::DimensionMismatch, "spsd_factor requires a square matrix");
  if (c.rows() > 2000) throw Error(ErrorCode::Unsupported, "spsd_factor is limited to n <= 2000");
  if (c.relative_asymmetry() > 1e-12) throw Error(ErrorCode::Asymmetric, "C must be symmetric");
  const Index n = c.rows();
  SpsdFactor out;
  out.e = DenseMatrix::Zero(0, n);
  out.f = DenseMatrix::Zero(0, 0);
  if (c.nonzeros() == 0 || n == 0) return out;

  DenseMatrix dense = c.to_dense();
  dense = 0.5 * (dense + dense.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(dense);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::InvalidInput, "eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();  // ascending
  const double lambda_max = lambda.cwiseAbs().maxCoeff();
  if (lambda_max == 0.0) return out;
  if (lambda.minCoeff() < -rank_tolerance * lambda_max)
    throw Error(ErrorCode::NotSpsd, "negative eigenvalue " + std::to_string(lambda.minCoeff()));

  std::vector<Index> keep;
  for (Index i = n - 1; i >= 0; --i)
    if (lambda[i] > rank_tolerance * lambda_max) keep.push_back(i);
  const auto l = static_cast<Index>(keep.size());
  out.rank = l;
  out.e.resize(l, n);
  out.f = DenseMatrix::Zero(l, l);
  for (Index r = 0; r < l; ++r) {
    out.e.row(r) = eig.eigenvectors().col(keep[r]).transpose();
    out.f(r, r) = lambda[keep[r]];
  }
  return out;
}

}  // namespace gsp
