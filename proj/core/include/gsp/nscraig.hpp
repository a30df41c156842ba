#pragma once

#include <span>

#include "gsp/linops.hpp"
#include "gsp/system.hpp"

namespace gsp {

/// nsCRAIG for generalized saddle point systems with nonsymmetric (positive
/// definite) M. All right vectors are kept and orthogonalized with modified
/// Gram-Schmidt; the solution is assembled only once the stopping test fires
/// (or every step when `record_iterates` is set) from
///
///     y_k = -B_k^{-1} H_k^{-1} beta_1 e_1,  p = Q_k y_k,  u = -M^{-1} A p.
///
/// With symmetric M the scalars coincide with craig_solve.
SolveResult nscraig_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg = {});

/// (sum_{i=k-d+1..k} chi_i zeta_i) / (sum_{i=1..k} chi_i zeta_i) with
/// z_k = L_k^{-T} x_k. May be negative or exceed one.
double nscraig_error_estimate(std::span<const double> chis, const DenseMatrix& lower, Index k, Index d);

/// B_k and H_k of a finished nsCRAIG run.
struct HessenbergFactors {
  DenseMatrix b;
  DenseMatrix h;

  /// Unit lower triangular L with H = B^T L^T.
  DenseMatrix lower() const;
  Index steps() const noexcept { return b.rows(); }
};

/// Uses the first k steps (k = result.iterations when k < 0).
HessenbergFactors hessenberg_factors(const SolveResult& result, Index k = -1);

}  // namespace gsp
