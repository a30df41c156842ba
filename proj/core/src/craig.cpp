#include "gsp/craig.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace gsp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_preconditioner(const SaddleSystem& sys, const SpdPreconditioner& n) {
  if (n.dimension() != sys.n_size())
    throw Error(ErrorCode::DimensionMismatch, "preconditioner N must be n x n with n=" + std::to_string(sys.n_size()));
}

}  // namespace

double craig_error_estimate(std::span<const double> zetas, Index k, Index d) {
  if (d < 1) throw Error(ErrorCode::InvalidInput, "delay must be >= 1");
  if (k < d || static_cast<Index>(zetas.size()) < k)
    throw Error(ErrorCode::InsufficientHistory,
                "error estimate needs k >= d and k recorded scalars (k=" + std::to_string(k) +
                    ", d=" + std::to_string(d) + ")");
  double total = 0.0;
  double tail = 0.0;
  for (Index i = 0; i < k; ++i) {
    const double z2 = zetas[i] * zetas[i];
    total += z2;
    if (i >= k - d) tail += z2;
  }
  if (total == 0.0) return 0.0;
  return tail / total;
}

SolveResult craig_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg) {
  cfg.validate();
  if (!sys.symmetric())
    throw Error(ErrorCode::WrongSolver, "CRAIG requires symmetric M; use nsCRAIG for nonsymmetric M");
  check_preconditioner(sys, n);

  const auto t0 = Clock::now();
  const SparseMatrix& mmat = sys.m();
  const SparseMatrix& a = sys.a();
  const SparseMatrix& c = sys.c();
  const FactorizedOperator& msolve = sys.m_solver();

  SolveResult res;
  res.solver = "craig";

  Vector g = n.solve(sys.b());
  const double beta1 = checked_sqrt(sys.b().dot(g), sys.b().squaredNorm());
  if (beta1 == 0.0) throw Error(ErrorCode::ZeroRhs, "right-hand side b is zero");
  res.beta1 = beta1;
  res.betas.push_back(beta1);

  Vector q = g / beta1;
  Vector w = msolve.solve(a.multiply(q));
  Vector r = q;
  Vector s = c.multiply(r);
  double alpha = checked_sqrt(weighted_inner(mmat, w, w) + r.dot(s), w.squaredNorm() + r.squaredNorm());
  if (!(alpha > 0.0)) throw Error(ErrorCode::Breakdown, "alpha_1 vanished");
  const double alpha1 = alpha;
  Vector v = w / alpha;
  Vector t = s / alpha;
  double zeta = beta1 / alpha;
  Vector u = zeta * v;
  Vector p = -(zeta / alpha) * r;
  res.alphas.push_back(alpha);
  res.scalars.push_back(zeta);

  const bool keep_basis = cfg.reorthogonalize || cfg.record_iterates;
  const bool want_estimate = cfg.criterion != StoppingCriterion::RelativeResidual;
  const bool use_residual = cfg.criterion != StoppingCriterion::ErrorEstimate;

  for (Index k = 1;; ++k) {
    if (keep_basis) res.right_basis.push_back(q);
    if (cfg.record_iterates) {
      res.u_iterates.push_back(u);
      res.p_iterates.push_back(p);
    }

    g = n.solve(a.multiply_transpose(v) + t) - alpha * q;
    if (cfg.reorthogonalize) {
      for (const Vector& qj : res.right_basis) g -= weighted_inner(n.op(), qj, g) * qj;
    }
    const double beta = checked_sqrt(weighted_inner(n.op(), g, g), g.squaredNorm());
    res.betas.push_back(beta);

    ConvergenceRecord rec;
    rec.k = k;
    rec.res_rel = beta * std::abs(zeta) / beta1;
    rec.alpha = alpha;
    rec.beta_next = beta;
    rec.scalar = zeta;
    if (want_estimate && k >= cfg.delay) rec.err_est = craig_error_estimate(res.scalars, k, cfg.delay);
    rec.wall_time = seconds_since(t0);
    res.history.push_back(rec);
    res.iterations = k;

    if (beta <= cfg.breakdown_tolerance * beta1) {
      res.termination = Termination::ExactTermination;
      break;
    }
    if (use_residual && rec.res_rel < cfg.tolerance) {
      res.termination = Termination::Converged;
      res.stop_reason = StopReason::Residual;
      break;
    }
    if (rec.err_est && std::sqrt(*rec.err_est) < cfg.tolerance) {
      res.termination = Termination::Converged;
      res.stop_reason = StopReason::ErrorEstimate;
      break;
    }
    if (k >= cfg.max_iterations) {
      res.termination = Termination::MaxIterations;
      break;
    }

    q = g / beta;
    w = msolve.solve(a.multiply(q) - beta * mmat.multiply(v));
    r = q - (beta / alpha) * r;
    s = c.multiply(r);
    const double alpha_next =
        checked_sqrt(weighted_inner(mmat, w, w) + r.dot(s), w.squaredNorm() + r.squaredNorm());
    if (alpha_next <= cfg.breakdown_tolerance * alpha1) {
      res.termination = Termination::Breakdown;
      break;
    }
    alpha = alpha_next;
    v = w / alpha;
    t = s / alpha;
    zeta = -(beta / alpha) * zeta;
    u += zeta * v;
    p -= (zeta / alpha) * r;
    res.alphas.push_back(alpha);
    res.scalars.push_back(zeta);
  }

  res.u = std::move(u);
  res.p = std::move(p);
  res.solve_seconds = seconds_since(t0);
  return res;
}

}  // namespace gsp
