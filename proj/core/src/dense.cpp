#include "gsp/dense.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace gsp::dense {

DenseMatrix upper_bidiagonal(std::span<const double> alphas, std::span<const double> betas, Index k) {
  DenseMatrix b = DenseMatrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    b(i, i) = alphas[i];
    if (i + 1 < k) b(i, i + 1) = betas[i + 1];
  }
  return b;
}

DenseMatrix upper_hessenberg(const std::vector<Vector>& hcols, std::span<const double> betas, Index k) {
  DenseMatrix h = DenseMatrix::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    const Vector& col = hcols[j];
    for (Index i = 0; i <= j && i < col.size(); ++i) h(i, j) = col[i];
    if (j + 1 < k) h(j + 1, j) = betas[j + 1];
  }
  return h;
}

Vector solve_upper_bidiagonal(std::span<const double> alphas, std::span<const double> betas,
                              const Vector& rhs) {
  const Index k = rhs.size();
  Vector y(k);
  for (Index i = k - 1; i >= 0; --i) {
    double v = rhs[i];
    if (i + 1 < k) v -= betas[i + 1] * y[i + 1];
    y[i] = v / alphas[i];
  }
  return y;
}

Vector solve_upper_bidiagonal_transpose(std::span<const double> alphas, std::span<const double> betas,
                                        const Vector& rhs) {
  const Index k = rhs.size();
  Vector x(k);
  for (Index i = 0; i < k; ++i) {
    double v = rhs[i];
    if (i > 0) v -= betas[i] * x[i - 1];
    x[i] = v / alphas[i];
  }
  return x;
}

Vector solve_hessenberg(const DenseMatrix& h, const Vector& rhs) {
  const Index k = h.rows();
  if (h.cols() != k || rhs.size() != k)
    throw Error(ErrorCode::DimensionMismatch, "solve_hessenberg: shape mismatch");
  DenseMatrix a = h;
  Vector b = rhs;
  const double scale = k > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  for (Index j = 0; j < k; ++j) {
    if (j + 1 < k && std::abs(a(j + 1, j)) > std::abs(a(j, j))) {
      a.row(j).swap(a.row(j + 1));
      std::swap(b[j], b[j + 1]);
    }
    if (!(std::abs(a(j, j)) > 1e-15 * scale))
      throw Error(ErrorCode::Singular, "singular Hessenberg matrix at column " + std::to_string(j));
    if (j + 1 < k) {
      const double factor = a(j + 1, j) / a(j, j);
      a.row(j + 1).tail(k - j) -= factor * a.row(j).tail(k - j);
      b[j + 1] -= factor * b[j];
    }
  }
  Vector y(k);
  for (Index i = k - 1; i >= 0; --i) {
    double v = b[i];
    for (Index j = i + 1; j < k; ++j) v -= a(i, j) * y[j];
    y[i] = v / a(i, i);
  }
  return y;
}

Vector solve_unit_lower_transpose(const DenseMatrix& l, const Vector& x) {
  const Index k = x.size();
  Vector z(k);
  for (Index i = k - 1; i >= 0; --i) {
    double v = x[i];
    for (Index j = i + 1; j < k; ++j) v -= l(j, i) * z[j];
    z[i] = v;
  }
  return z;
}

DenseMatrix lower_factor_from_hessenberg(std::span<const double> alphas, std::span<const double> betas,
                                         const DenseMatrix& h) {
  const Index k = h.rows();
  DenseMatrix lt(k, k);
  for (Index j = 0; j < k; ++j)
    lt.col(j) = solve_upper_bidiagonal_transpose(alphas, betas, h.col(j));
  DenseMatrix l = DenseMatrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    l(i, i) = 1.0;
    for (Index j = 0; j < i; ++j) l(i, j) = lt(j, i);
  }
  return l;
}

}  // namespace gsp::dense
