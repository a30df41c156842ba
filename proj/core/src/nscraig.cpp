#include "gsp/nscraig.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "gsp/dense.hpp"

namespace gsp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vector head_of(const std::vector<double>& v, Index k) {
  return Eigen::Map<const Vector>(v.data(), k);
}

// Grows the unit lower factor L of H = B^T L^T by one row per step.
class LowerFactor {
public:
  void append(std::span<const double> alphas, std::span<const double> betas, const Vector& hcol) {
    const Index k = hcol.size();
    DenseMatrix grown = DenseMatrix::Zero(k, k);
    if (k > 1) grown.topLeftCorner(k - 1, k - 1) = l_;
    const Vector row = dense::solve_upper_bidiagonal_transpose(alphas.first(k), betas, hcol);
    for (Index j = 0; j + 1 < k; ++j) grown(k - 1, j) = row[j];
    grown(k - 1, k - 1) = 1.0;
    l_ = std::move(grown);
  }
  const DenseMatrix& matrix() const noexcept { return l_; }

private:
  DenseMatrix l_;
};

}  // namespace

double nscraig_error_estimate(std::span<const double> chis, const DenseMatrix& lower, Index k, Index d) {
  if (d < 1) throw Error(ErrorCode::InvalidInput, "delay must be >= 1");
  if (k < d || static_cast<Index>(chis.size()) < k || lower.rows() < k || lower.cols() < k)
    throw Error(ErrorCode::InsufficientHistory,
                "error estimate needs k >= d with k scalars and a k x k factor (k=" + std::to_string(k) +
                    ", d=" + std::to_string(d) + ")");
  const Vector x = Eigen::Map<const Vector>(chis.data(), k);
  const Vector z = dense::solve_unit_lower_transpose(lower.topLeftCorner(k, k), x);
  double total = 0.0;
  double tail = 0.0;
  for (Index i = 0; i < k; ++i) {
    const double prod = x[i] * z[i];
    total += prod;
    if (i >= k - d) tail += prod;
  }
  if (total == 0.0) return 0.0;
  return tail / total;
}

DenseMatrix HessenbergFactors::lower() const {
  const Index k = b.rows();
  std::vector<double> alphas(k), betas(k + 1, 0.0);
  for (Index i = 0; i < k; ++i) alphas[i] = b(i, i);
  for (Index i = 1; i < k; ++i) betas[i] = b(i - 1, i);
  return dense::lower_factor_from_hessenberg(alphas, betas, h);
}

HessenbergFactors hessenberg_factors(const SolveResult& result, Index k) {
  if (k < 0) k = result.iterations;
  if (k < 1 || static_cast<Index>(result.alphas.size()) < k || static_cast<Index>(result.betas.size()) < k ||
      static_cast<Index>(result.hessenberg_columns.size()) < k)
    throw Error(ErrorCode::MissingHistory, "result does not hold " + std::to_string(k) + " Hessenberg columns");
  HessenbergFactors f;
  f.b = dense::upper_bidiagonal(result.alphas, result.betas, k);
  f.h = dense::upper_hessenberg(result.hessenberg_columns, result.betas, k);
  return f;
}

SolveResult nscraig_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg) {
  cfg.validate();
  if (n.dimension() != sys.n_size())
    throw Error(ErrorCode::DimensionMismatch, "preconditioner N must be n x n with n=" + std::to_string(sys.n_size()));

  const auto t0 = Clock::now();
  const SparseMatrix& mmat = sys.m();
  const SparseMatrix& a = sys.a();
  const SparseMatrix& c = sys.c();
  const FactorizedOperator& msolve = sys.m_solver();

  SolveResult res;
  res.solver = "nscraig";

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
  double chi = beta1 / alpha;
  res.alphas.push_back(alpha);
  res.scalars.push_back(chi);

  // N q_j, kept so that each Gram-Schmidt coefficient costs one dot product.
  std::vector<Vector> nq;
  LowerFactor lower;
  const bool factored = cfg.hessenberg_solve == HessenbergSolve::Factored;
  const bool want_estimate = cfg.criterion != StoppingCriterion::RelativeResidual;
  const bool use_residual = cfg.criterion != StoppingCriterion::ErrorEstimate;

  auto assemble = [&](Index k, Vector& u_out, Vector& p_out) {
    Vector z;
    if (factored) {
      z = dense::solve_unit_lower_transpose(lower.matrix(), head_of(res.scalars, k));
    } else {
      Vector rhs = Vector::Zero(k);
      rhs[0] = beta1;
      try {
        z = dense::solve_hessenberg(dense::upper_hessenberg(res.hessenberg_columns, res.betas, k), rhs);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Singular) throw;
        throw Error(ErrorCode::Breakdown, std::string("projected Hessenberg matrix is singular: ") + e.what());
      }
    }
    const Vector y = -dense::solve_upper_bidiagonal(res.alphas, res.betas, z);
    p_out = Vector::Zero(sys.n_size());
    for (Index j = 0; j < k; ++j) p_out += y[j] * res.right_basis[j];
    u_out = -msolve.solve(a.multiply(p_out));
  };

  Vector u, p;
  for (Index k = 1;; ++k) {
    res.right_basis.push_back(q);
    nq.push_back(n.apply(q));

    g = n.solve(a.multiply_transpose(v) + t);
    Vector h = Vector::Zero(k);
    for (Index j = 0; j < k; ++j) {
      const double hj = nq[j].dot(g);
      h[j] = hj;
      g -= hj * res.right_basis[j];
    }
    if (cfg.reorthogonalize) {
      for (Index j = 0; j < k; ++j) {
        const double hj = nq[j].dot(g);
        h[j] += hj;
        g -= hj * res.right_basis[j];
      }
    }
    const double beta = checked_sqrt(weighted_inner(n.op(), g, g), g.squaredNorm());
    res.betas.push_back(beta);
    res.hessenberg_columns.push_back(h);
    if (factored) lower.append(res.alphas, res.betas, h);

    ConvergenceRecord rec;
    rec.k = k;
    rec.res_rel = beta * std::abs(chi) / beta1;
    rec.alpha = alpha;
    rec.beta_next = beta;
    rec.scalar = chi;
    if (want_estimate && k >= cfg.delay) {
      const DenseMatrix l =
          factored ? lower.matrix()
                   : dense::lower_factor_from_hessenberg(res.alphas, res.betas,
                                                         dense::upper_hessenberg(res.hessenberg_columns, res.betas, k));
      rec.err_est = nscraig_error_estimate(res.scalars, l, k, cfg.delay);
    }
    if (cfg.record_iterates) {
      assemble(k, u, p);
      res.u_iterates.push_back(u);
      res.p_iterates.push_back(p);
    }
    rec.wall_time = seconds_since(t0);
    res.history.push_back(rec);
    res.iterations = k;

    bool stop = true;
    if (beta <= cfg.breakdown_tolerance * beta1) {
      res.termination = Termination::ExactTermination;
    } else if (use_residual && rec.res_rel < cfg.tolerance) {
      res.termination = Termination::Converged;
      res.stop_reason = StopReason::Residual;
    } else if (rec.err_est && std::sqrt(std::abs(*rec.err_est)) < cfg.tolerance) {
      res.termination = Termination::Converged;
      res.stop_reason = StopReason::ErrorEstimate;
    } else if (k >= cfg.max_iterations) {
      res.termination = Termination::MaxIterations;
    } else {
      stop = false;
    }

    if (!stop) {
      q = g / beta;
      w = msolve.solve(a.multiply(q) - beta * mmat.multiply(v));
      r = q - (beta / alpha) * r;
      s = c.multiply(r);
      const double alpha_next =
          checked_sqrt(weighted_inner(mmat, w, w) + r.dot(s), w.squaredNorm() + r.squaredNorm());
      if (alpha_next <= cfg.breakdown_tolerance * alpha1) {
        res.termination = Termination::Breakdown;
        stop = true;
      } else {
        alpha = alpha_next;
        v = w / alpha;
        t = s / alpha;
        chi = -(beta / alpha) * chi;
        res.alphas.push_back(alpha);
        res.scalars.push_back(chi);
      }
    }

    if (stop) {
      if (!cfg.record_iterates) assemble(k, u, p);
      break;
    }
  }

  res.u = std::move(u);
  res.p = std::move(p);
  res.solve_seconds = seconds_since(t0);
  return res;
}

}  // namespace gsp
