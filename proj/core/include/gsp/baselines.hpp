#pragma once

#include <utility>

#include "gsp/linops.hpp"
#include "gsp/system.hpp"

namespace gsp {

/// S = A^T M^{-1} A + C applied matrix-free through the factorization of M.
class SchurOperator {
public:
  explicit SchurOperator(SaddleSystem sys) : sys_(std::move(sys)) {}

  Index dimension() const noexcept { return sys_.n_size(); }
  Vector apply(const Vector& x) const;
  /// Column-by-column dense S.
  DenseMatrix dense() const;

private:
  SaddleSystem sys_;
};

/// blkdiag(M, N)^{-1} applied blockwise.
class BlockDiagPreconditioner {
public:
  BlockDiagPreconditioner(FactorizedOperator m_solve, FactorizedOperator n_solve);

  Index m_size() const noexcept { return m_.dimension(); }
  Index n_size() const noexcept { return n_.dimension(); }
  Vector solve(const Vector& x) const;

private:
  FactorizedOperator m_;
  FactorizedOperator n_;
};

/// Preconditioned CG on S p = -b with preconditioner N, zero start; u = -M^{-1} A p
/// at the end. Stops on ||-b - S p||_{N^-1} / ||b||_{N^-1} < tolerance.
SolveResult scr_cg_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg = {});

/// FOM on S p = -b with Arnoldi (modified Gram-Schmidt) in the N inner product.
SolveResult scr_fom_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg = {});

/// MINRES on the full system with SPD preconditioner blkdiag(M, N). The
/// history holds the blkdiag(M, N)^{-1}-norm of the residual relative to its
/// initial value.
SolveResult pminres_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg = {});

/// Unrestarted right-preconditioned GMRES on the full system with
/// blkdiag(M, N); history holds relative 2-norm residuals.
SolveResult pgmres_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg = {});

/// Dense LU with partial pivoting on the full matrix (m + n <= 5000).
std::pair<Vector, Vector> direct_solve(const SaddleSystem& sys);

/// Same for a general right-hand side (f; g).
std::pair<Vector, Vector> direct_solve(const SaddleSystem& sys, const Vector& f, const Vector& g);

}  // namespace gsp
