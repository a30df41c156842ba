#pragma once

#include <optional>
#include <vector>

#include "gsp/linops.hpp"
#include "gsp/system.hpp"

namespace gsp::gkb {

/// The explicitly augmented standard saddle point form
///
///     [ Mbar  Abar ] [ubar]   [0]      Mbar = blkdiag(M, F^{-1})
///     [ Abar^T  0  ] [ p  ] = [b],     Abar = [A; E],  C = E^T F E
///
/// built from a SaddleSystem through spsd_factor. Oracle use only: the
/// production solvers never form E or F.
struct AugmentedSystem {
  FactorizedOperator m;
  DenseMatrix f;           ///< l x l, SPD diagonal
  FactorizedOperator f_op; ///< apply = F x, solve = F^{-1} x
  SparseMatrix a;
  DenseMatrix e;           ///< l x n
  Vector b;
  bool symmetric = true;

  Index m_size() const noexcept { return a.rows(); }
  Index n_size() const noexcept { return a.cols(); }
  Index l_size() const noexcept { return e.rows(); }
};

/// Throws DegenerateC when C has rank zero.
AugmentedSystem make_augmented(const SaddleSystem& sys, double rank_tolerance = 1e-12);

struct GkbBasis {
  std::vector<Vector> q;   ///< q_1..q_k (length n)
  std::vector<Vector> vx;  ///< v_{1,x}..v_{k,x} (length m)
  std::vector<Vector> vc;  ///< v_{1,c}..v_{k,c} (length l)
  Vector q_next;           ///< q_{k+1}, zero on exact termination
};

struct BidiagFactors {
  std::vector<double> alphas;  ///< alpha_1..alpha_k
  std::vector<double> betas;   ///< beta_1..beta_{k+1}
  /// Nonsymmetric only: h_j (length j) for j = 1..k.
  std::vector<Vector> hessenberg_columns;
  /// Nonsymmetric only: the unit lower triangular L_k with H_k = B_k^T L_k^T.
  std::optional<DenseMatrix> lower;

  Index steps() const noexcept { return static_cast<Index>(alphas.size()); }
  DenseMatrix bidiagonal() const;
  /// H_k; equals B_k^T in the symmetric case.
  DenseMatrix hessenberg() const;
};

struct GkbOptions {
  /// Symmetric: full reorthogonalization of q_{k+1}. Nonsymmetric: second MGS pass.
  bool reorthogonalize = false;
  double breakdown_tolerance = 1e-14;
};

struct GkbResult {
  GkbBasis basis;
  BidiagFactors factors;
  bool exact_termination = false;
};

/// Generalized Golub-Kahan bidiagonalization of Abar with respect to the
/// Mbar and N inner products (short recurrence).
GkbResult gkb_symmetric(const AugmentedSystem& aug, const SpdPreconditioner& n, Index steps,
                        const GkbOptions& options = {});

/// Nonsymmetric variant: the right vectors are orthogonalized against all
/// previous ones with modified Gram-Schmidt, producing the Hessenberg H_k.
GkbResult gkb_nonsymmetric(const AugmentedSystem& aug, const SpdPreconditioner& n, Index steps,
                           const GkbOptions& options = {});

struct DecompositionReport {
  Index steps = 0;
  double scale = 0.0;               ///< ||A||_F + ||E||_F
  double left_residual = 0.0;       ///< ||Abar Q - Mbar Vbar B||_F
  double right_residual = 0.0;      ///< ||Abar^T Vbar - N Q (B^T|H) - beta N q_{k+1} e_k^T||_F
  double q_orthogonality = 0.0;     ///< ||Q^T N Q - I||_F
  double v_orthogonality = 0.0;     ///< ||Vbar^T Mbar Vbar - (I|L)||_F
  double factor_identity = 0.0;     ///< ||H - B^T L^T||_F / ||H||_F, L from the basis
  std::optional<double> schur_projection;  ///< ||(B^T B|H B) - Q^T S Q||_F / ||Q^T S Q||_F
};

DecompositionReport verify_decomposition(const AugmentedSystem& aug, const SpdPreconditioner& n,
                                         const GkbBasis& basis, const BidiagFactors& factors,
                                         bool symmetric);

}  // namespace gsp::gkb
