#pragma once

#include <span>

#include "gsp/linops.hpp"
#include "gsp/system.hpp"

namespace gsp {

/// CRAIG for symmetric generalized saddle point systems.
///
/// Runs the generalized Golub-Kahan bidiagonalization of the augmented
/// off-diagonal block directly on (M, A, C): C enters only through the
/// products s_k = C r_k, so no factorization C = E^T F E is ever needed.
/// The iterates follow the short recurrences
///
///     u^(k) = u^(k-1) + zeta_k v_k,   p^(k) = p^(k-1) - (zeta_k / alpha_k) r_k,
///
/// and the relative residual ||b - A^T u + C p||_{N^-1} / ||b||_{N^-1} equals
/// beta_{k+1} |zeta_k| / beta_1, available at no extra cost. Working memory is
/// O(m + n) unless reorthogonalization or iterate recording is requested.
///
/// Mid-run breakdown (alpha_{k+1} tiny) is reported as Termination::Breakdown
/// with the last good iterate; a zero right-hand side or a nonsymmetric M
/// throws.
SolveResult craig_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg = {});

/// Squared delayed relative error estimate
///     (sum_{i=k-d+1..k} zeta_i^2) / (sum_{i=1..k} zeta_i^2)
/// over zetas[0..k).
double craig_error_estimate(std::span<const double> zetas, Index k, Index d);

}  // namespace gsp
