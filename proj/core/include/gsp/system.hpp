#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gsp/linops.hpp"

namespace gsp {

/// A generalized saddle point problem
///
///     [ M   A ] [u]   [0]
///     [ A^T -C] [p] = [b]
///
/// with M (m x m) positive definite, A (m x n) of full column rank and C
/// (n x n) symmetric positive semi-definite. M is factorized once at
/// construction (Cholesky when symmetric, LU otherwise); the explicit matrix
/// is kept as well because the bidiagonalization needs products M*v.
class SaddleSystem {
public:
  /// Detects symmetry of M (relative asymmetry <= 1e-12).
  static SaddleSystem create(SparseMatrix m, SparseMatrix a, SparseMatrix c, Vector b);
  /// Uses the given flag; `symmetric == true` is rejected when M is not symmetric.
  static SaddleSystem create(SparseMatrix m, SparseMatrix a, SparseMatrix c, Vector b, bool symmetric);

  Index m_size() const noexcept { return data_->a.rows(); }
  Index n_size() const noexcept { return data_->a.cols(); }

  const SparseMatrix& m() const noexcept { return data_->m; }
  const SparseMatrix& a() const noexcept { return data_->a; }
  const SparseMatrix& c() const noexcept { return data_->c; }
  const Vector& b() const noexcept { return data_->b; }
  const FactorizedOperator& m_solver() const noexcept { return data_->m_solver; }
  bool symmetric() const noexcept { return data_->symmetric; }
  /// Wall time spent factorizing M.
  double factorization_seconds() const noexcept { return data_->factor_seconds; }

  /// Same operator (sharing the factorization) with a new right-hand side.
  SaddleSystem with_rhs(Vector b) const;

  /// The full (m+n) x (m+n) coefficient matrix.
  SparseMatrix full_matrix() const;
  /// [M u + A p ; A^T u - C p]
  Vector full_apply(const Vector& u, const Vector& p) const;

private:
  struct Data {
    SparseMatrix m, a, c;
    Vector b;
    FactorizedOperator m_solver;
    bool symmetric;
    double factor_seconds;
  };
  explicit SaddleSystem(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

enum class StoppingCriterion {
  RelativeResidual,  ///< beta_{k+1} |zeta_k| / beta_1 < tol
  ErrorEstimate,     ///< delayed relative energy-error estimate < tol
  Either,            ///< whichever fires first
};

enum class HessenbergSolve {
  Factored,  ///< H = B^T L^T, two triangular solves
  Dense,     ///< row-pivoted elimination on the assembled H
};

struct SolverConfig {
  double tolerance = 1e-6;
  Index max_iterations = 3000;
  StoppingCriterion criterion = StoppingCriterion::RelativeResidual;
  Index delay = 1;
  /// Symmetric solvers: reorthogonalize each new q against all stored ones.
  /// nsCRAIG/FOM: run a second Gram-Schmidt pass.
  bool reorthogonalize = false;
  /// Keep (u^(k), p^(k)) for every k. nsCRAIG assembles eagerly in this mode.
  bool record_iterates = false;
  /// alpha_{k+1} <= tol * alpha_1 is a breakdown, beta_{k+1} <= tol * beta_1 exact termination.
  double breakdown_tolerance = 1e-14;
  HessenbergSolve hessenberg_solve = HessenbergSolve::Factored;

  void validate() const;
};

enum class Termination { Converged, MaxIterations, Breakdown, ExactTermination };
enum class StopReason { None, Residual, ErrorEstimate };

const char* to_string(Termination t) noexcept;
const char* to_string(StopReason r) noexcept;
const char* to_string(StoppingCriterion c) noexcept;

inline bool succeeded(Termination t) noexcept {
  return t == Termination::Converged || t == Termination::ExactTermination;
}

struct ConvergenceRecord {
  Index k = 0;
  double res_rel = 0.0;
  std::optional<double> err_est;
  double alpha = 0.0;
  double beta_next = 0.0;
  /// zeta_k for CRAIG, chi_k for nsCRAIG, solver-specific otherwise.
  double scalar = 0.0;
  double wall_time = 0.0;
};

struct SolveResult {
  std::string solver;
  Vector u;
  Vector p;
  Index iterations = 0;
  Termination termination = Termination::MaxIterations;
  StopReason stop_reason = StopReason::None;
  std::vector<ConvergenceRecord> history;
  double beta1 = 0.0;
  double solve_seconds = 0.0;

  /// Bidiagonalization scalars: alphas[i] = alpha_{i+1}, betas[i] = beta_{i+1}.
  std::vector<double> alphas;
  std::vector<double> betas;
  /// zeta_k (CRAIG) or chi_k (nsCRAIG).
  std::vector<double> scalars;
  std::vector<Vector> hessenberg_columns;

  /// Filled when SolverConfig::record_iterates is set.
  std::vector<Vector> u_iterates;
  std::vector<Vector> p_iterates;
  /// q_1..q_k; always for nsCRAIG, for CRAIG when reorthogonalizing or recording.
  std::vector<Vector> right_basis;
};

}  // namespace gsp
