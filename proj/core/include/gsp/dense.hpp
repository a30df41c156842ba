#pragma once

#include <span>
#include <vector>

#include "gsp/linops.hpp"

namespace gsp::dense {

/// k x k upper bidiagonal B with diag alpha_1..alpha_k and superdiag beta_2..beta_k.
/// `betas[0]` is beta_1 (unused here); `betas[i]` is beta_{i+1}.
DenseMatrix upper_bidiagonal(std::span<const double> alphas, std::span<const double> betas, Index k);

/// k x k upper Hessenberg with column j holding hcols[j] (length j+1) and
/// subdiagonal entry beta_{j+2} = betas[j+1].
DenseMatrix upper_hessenberg(const std::vector<Vector>& hcols, std::span<const double> betas, Index k);

/// Solves B y = rhs by back substitution.
Vector solve_upper_bidiagonal(std::span<const double> alphas, std::span<const double> betas,
                              const Vector& rhs);
/// Solves B^T x = rhs by forward substitution.
Vector solve_upper_bidiagonal_transpose(std::span<const double> alphas, std::span<const double> betas,
                                        const Vector& rhs);

/// Gaussian elimination with row pivoting restricted to adjacent rows (the
/// only fill a Hessenberg matrix admits). Throws Singular on a zero pivot.
Vector solve_hessenberg(const DenseMatrix& h, const Vector& rhs);

/// Solves L^T z = x for unit lower triangular L (only the strict lower part is read).
Vector solve_unit_lower_transpose(const DenseMatrix& l, const Vector& x);

/// Recovers the unit lower triangular L of H = B^T L^T as L = (B^{-T} H)^T.
/// Entries above the diagonal of the result are rounding noise and are dropped.
DenseMatrix lower_factor_from_hessenberg(std::span<const double> alphas, std::span<const double> betas,
                                         const DenseMatrix& h);

}  // namespace gsp::dense
