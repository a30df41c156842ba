#pragma once

#include <optional>
#include <vector>

#include "gsp/linops.hpp"
#include "gsp/system.hpp"

namespace gsp {

/// Recomputed residual quantities for one recorded iteration.
struct ResidualDefect {
  Index k = 0;
  double explicit_norm = 0.0;  ///< ||b - A^T u^(k) + C p^(k)||_{N^-1}
  double estimate = 0.0;       ///< beta_{k+1} |scalar_k| from the history
  double defect = 0.0;         ///< |explicit - estimate| / beta_1
  double upper_block = 0.0;    ///< ||M u^(k) + A p^(k)||_2
  double upper_bound = 0.0;    ///< ||A||_F ||p^(k)||_2
  std::optional<double> orthogonality;  ///< max_j |q_j^T r^(k)|, j <= k
};

/// Requires iterates recorded for every history entry (MissingHistory otherwise).
std::vector<ResidualDefect> craig_residual_check(const SaddleSystem& sys, const SpdPreconditioner& n,
                                                 const SolveResult& result);
/// As craig_residual_check, additionally requiring the right basis so that
/// the orthogonality of the residual to Q_k is always reported.
std::vector<ResidualDefect> nscraig_residual_check(const SaddleSystem& sys, const SpdPreconditioner& n,
                                                   const SolveResult& result);

/// ||u* - u||_M^2 + (p* - p)^T C (p* - p)
double energy_error(const SaddleSystem& sys, const Vector& u_star, const Vector& p_star, const Vector& u,
                    const Vector& p);

/// ||z - z*||_2 / ||z*||_2 over the stacked vector z = [u; p] (zero start).
double relative_error(const Vector& u_star, const Vector& p_star, const Vector& u, const Vector& p);

/// ||[0; b] - K [u; p]||_2 / ||[0; b]||_2
double relative_full_residual(const SaddleSystem& sys, const Vector& u, const Vector& p);

}  // namespace gsp
