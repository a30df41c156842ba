#include "gsp/baselines.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "gsp/dense.hpp"

namespace gsp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_n(const SaddleSystem& sys, const SpdPreconditioner& n) {
  if (n.dimension() != sys.n_size())
    throw Error(ErrorCode::DimensionMismatch, "preconditioner N must be n x n with n=" + std::to_string(sys.n_size()));
}

Vector stack(const Vector& top, const Vector& bottom) {
  Vector z(top.size() + bottom.size());
  z << top, bottom;
  return z;
}

void finish(SolveResult& res, Vector z, Index m, Clock::time_point t0) {
  res.u = z.head(m);
  res.p = z.tail(z.size() - m);
  res.solve_seconds = seconds_since(t0);
}

}  // namespace

Vector SchurOperator::apply(const Vector& x) const {
  if (x.size() != sys_.n_size()) throw Error(ErrorCode::DimensionMismatch, "Schur operator input has wrong length");
  return sys_.a().multiply_transpose(sys_.m_solver().solve(sys_.a().multiply(x))) + sys_.c().multiply(x);
}

DenseMatrix SchurOperator::dense() const {
  const Index n = sys_.n_size();
  DenseMatrix s(n, n);
  for (Index j = 0; j < n; ++j) s.col(j) = apply(Vector::Unit(n, j));
  return s;
}

BlockDiagPreconditioner::BlockDiagPreconditioner(FactorizedOperator m_solve, FactorizedOperator n_solve)
    : m_(std::move(m_solve)), n_(std::move(n_solve)) {}

Vector BlockDiagPreconditioner::solve(const Vector& x) const {
  if (x.size() != m_size() + n_size())
    throw Error(ErrorCode::DimensionMismatch, "block preconditioner input has wrong length");
  return stack(m_.solve(x.head(m_size())), n_.solve(x.tail(n_size())));
}

SolveResult scr_cg_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg) {
  cfg.validate();
  if (!sys.symmetric()) throw Error(ErrorCode::WrongSolver, "SCR(CG) requires symmetric M");
  check_n(sys, n);
  const auto t0 = Clock::now();
  const SchurOperator s(sys);

  SolveResult res;
  res.solver = "scr-cg";
  Vector p = Vector::Zero(sys.n_size());
  Vector r = -sys.b();
  Vector z = n.solve(r);
  double rz = r.dot(z);
  const double beta1 = checked_sqrt(rz, r.squaredNorm());
  if (beta1 == 0.0) throw Error(ErrorCode::ZeroRhs, "right-hand side b is zero");
  res.beta1 = beta1;
  Vector d = z;

  for (Index k = 1;; ++k) {
    const Vector sd = s.apply(d);
    const double dsd = d.dot(sd);
    if (!(dsd > 0.0)) {
      res.termination = Termination::Breakdown;
      break;
    }
    const double step = rz / dsd;
    p += step * d;
    r -= step * sd;
    z = n.solve(r);
    const double rz_next = r.dot(z);
    const double rnorm = checked_sqrt(rz_next, r.squaredNorm());

    ConvergenceRecord rec;
    rec.k = k;
    rec.res_rel = rnorm / beta1;
    rec.alpha = step;
    rec.beta_next = rz_next / rz;
    rec.scalar = rnorm;
    rec.wall_time = seconds_since(t0);
    res.history.push_back(rec);
    res.iterations = k;
    if (cfg.record_iterates) {
      res.p_iterates.push_back(p);
      res.u_iterates.push_back(-sys.m_solver().solve(sys.a().multiply(p)));
    }

    if (rnorm <= cfg.breakdown_tolerance * beta1) {
      res.termination = Termination::ExactTermination;
      break;
    }
    if (rec.res_rel < cfg.tolerance) {
      res.termination = Termination::Converged;
      res.stop_reason = StopReason::Residual;
      break;
    }
    if (k >= cfg.max_iterations) {
      res.termination = Termination::MaxIterations;
      break;
    }
    d = z + (rz_next / rz) * d;
    rz = rz_next;
  }

  res.u = -sys.m_solver().solve(sys.a().multiply(p));
  res.p = std::move(p);
  res.solve_seconds = seconds_since(t0);
  return res;
}

SolveResult scr_fom_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg) {
  cfg.validate();
  check_n(sys, n);
  const auto t0 = Clock::now();
  const SchurOperator s(sys);

  SolveResult res;
  res.solver = "scr-fom";
  const Vector nb = n.solve(sys.b());
  const double beta1 = checked_sqrt(sys.b().dot(nb), sys.b().squaredNorm());
  if (beta1 == 0.0) throw Error(ErrorCode::ZeroRhs, "right-hand side b is zero");
  res.beta1 = beta1;
  res.betas.push_back(beta1);

  std::vector<Vector>& q = res.right_basis;
  std::vector<Vector> nq;
  q.push_back(nb / beta1);

  auto solve_projected = [&](Index k) {
    Vector rhs = Vector::Zero(k);
    rhs[0] = -beta1;
    try {
      return Vector(dense::solve_hessenberg(dense::upper_hessenberg(res.hessenberg_columns, res.betas, k), rhs));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Singular) throw;
      throw Error(ErrorCode::Breakdown, std::string("FOM Hessenberg matrix is singular: ") + e.what());
    }
  };
  auto combine = [&](const Vector& y) {
    Vector p = Vector::Zero(sys.n_size());
    for (Index j = 0; j < y.size(); ++j) p += y[j] * q[j];
    return p;
  };

  Vector y;
  for (Index k = 1;; ++k) {
    nq.push_back(n.apply(q[k - 1]));
    Vector g = n.solve(s.apply(q[k - 1]));
    Vector h = Vector::Zero(k);
    const int passes = cfg.reorthogonalize ? 2 : 1;
    for (int pass = 0; pass < passes; ++pass) {
      for (Index j = 0; j < k; ++j) {
        const double hj = nq[j].dot(g);
        h[j] += hj;
        g -= hj * q[j];
      }
    }
    const double hnext = checked_sqrt(weighted_inner(n.op(), g, g), g.squaredNorm());
    res.hessenberg_columns.push_back(h);
    res.betas.push_back(hnext);

    y = solve_projected(k);
    ConvergenceRecord rec;
    rec.k = k;
    rec.res_rel = hnext * std::abs(y[k - 1]) / beta1;
    rec.alpha = h[k - 1];
    rec.beta_next = hnext;
    rec.scalar = y[k - 1];
    rec.wall_time = seconds_since(t0);
    res.history.push_back(rec);
    res.iterations = k;
    if (cfg.record_iterates) {
      const Vector p = combine(y);
      res.p_iterates.push_back(p);
      res.u_iterates.push_back(-sys.m_solver().solve(sys.a().multiply(p)));
    }

    if (hnext <= cfg.breakdown_tolerance * beta1) {
      res.termination = Termination::ExactTermination;
      break;
    }
    if (rec.res_rel < cfg.tolerance) {
      res.termination = Termination::Converged;
      res.stop_reason = StopReason::Residual;
      break;
    }
    if (k >= cfg.max_iterations) {
      res.termination = Termination::MaxIterations;
      break;
    }
    q.push_back(g / hnext);
  }
  q.resize(res.iterations);

  res.p = combine(y);
  res.u = -sys.m_solver().solve(sys.a().multiply(res.p));
  res.solve_seconds = seconds_since(t0);
  return res;
}

SolveResult pminres_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg) {
  cfg.validate();
  if (!sys.symmetric()) throw Error(ErrorCode::WrongSolver, "preconditioned MINRES requires symmetric M");
  check_n(sys, n);
  const auto t0 = Clock::now();
  const Index m = sys.m_size();
  const Index nn = sys.n_size();
  const BlockDiagPreconditioner prec(sys.m_solver(), n.op());
  auto kmul = [&](const Vector& z) { return sys.full_apply(z.head(m), z.tail(nn)); };

  SolveResult res;
  res.solver = "pminres";
  const Vector rhs = stack(Vector::Zero(m), sys.b());
  Vector x = Vector::Zero(m + nn);
  Vector v_prev = Vector::Zero(m + nn);
  Vector v = rhs;
  Vector z = prec.solve(v);
  double gamma = checked_sqrt(z.dot(v), v.squaredNorm());
  if (gamma == 0.0) throw Error(ErrorCode::ZeroRhs, "right-hand side b is zero");
  const double gamma1 = gamma;
  res.beta1 = gamma1;
  double gamma_prev = 1.0;
  double eta = gamma;
  double s_prev = 0.0, s = 0.0, c_prev = 1.0, c = 1.0;
  Vector w_prev = Vector::Zero(m + nn);
  Vector w = Vector::Zero(m + nn);

  for (Index k = 1;; ++k) {
    z /= gamma;
    const Vector kz = kmul(z);
    const double delta = kz.dot(z);
    Vector v_next = kz - (delta / gamma) * v - (gamma / gamma_prev) * v_prev;
    Vector z_next = prec.solve(v_next);
    const double gamma_next = checked_sqrt(z_next.dot(v_next), v_next.squaredNorm());
    const double a0 = c * delta - c_prev * s * gamma;
    const double a1 = std::hypot(a0, gamma_next);
    const double a2 = s * delta + c_prev * c * gamma;
    const double a3 = s_prev * gamma;
    if (!(a1 > 0.0)) {
      res.termination = Termination::Breakdown;
      break;
    }
    const double c_next = a0 / a1;
    const double s_next = gamma_next / a1;
    Vector w_next = (z - a3 * w_prev - a2 * w) / a1;
    x += c_next * eta * w_next;
    eta = -s_next * eta;

    ConvergenceRecord rec;
    rec.k = k;
    rec.res_rel = std::abs(eta) / gamma1;
    rec.alpha = delta;
    rec.beta_next = gamma_next;
    rec.scalar = eta;
    rec.wall_time = seconds_since(t0);
    res.history.push_back(rec);
    res.iterations = k;
    if (cfg.record_iterates) {
      res.u_iterates.push_back(x.head(m));
      res.p_iterates.push_back(x.tail(nn));
    }

    if (gamma_next <= cfg.breakdown_tolerance * gamma1) {
      res.termination = Termination::ExactTermination;
      break;
    }
    if (rec.res_rel < cfg.tolerance) {
      res.termination = Termination::Converged;
      res.stop_reason = StopReason::Residual;
      break;
    }
    if (k >= cfg.max_iterations) {
      res.termination = Termination::MaxIterations;
      break;
    }

    v_prev = std::move(v);
    v = std::move(v_next);
    z = std::move(z_next);
    gamma_prev = gamma;
    gamma = gamma_next;
    w_prev = std::move(w);
    w = std::move(w_next);
    c_prev = c;
    c = c_next;
    s_prev = s;
    s = s_next;
  }

  finish(res, std::move(x), m, t0);
  return res;
}

SolveResult pgmres_solve(const SaddleSystem& sys, const SpdPreconditioner& n, const SolverConfig& cfg) {
  cfg.validate();
  check_n(sys, n);
  const auto t0 = Clock::now();
  const Index m = sys.m_size();
  const Index nn = sys.n_size();
  const BlockDiagPreconditioner prec(sys.m_solver(), n.op());
  auto kmul = [&](const Vector& z) { return sys.full_apply(z.head(m), z.tail(nn)); };

  SolveResult res;
  res.solver = "pgmres";
  const Vector rhs = stack(Vector::Zero(m), sys.b());
  const double beta1 = rhs.norm();
  if (beta1 == 0.0) throw Error(ErrorCode::ZeroRhs, "right-hand side b is zero");
  res.beta1 = beta1;

  std::vector<Vector> v{rhs / beta1};
  std::vector<Vector> r_cols;  // Givens-rotated columns of the Hessenberg matrix
  std::vector<double> cs, sn;
  std::vector<double> gvec{beta1};

  auto current_x = [&](Index k) {
    Vector y(k);
    for (Index i = k - 1; i >= 0; --i) {
      double acc = gvec[i];
      for (Index j = i + 1; j < k; ++j) acc -= r_cols[j][i] * y[j];
      y[i] = acc / r_cols[i][i];
    }
    Vector comb = Vector::Zero(m + nn);
    for (Index j = 0; j < k; ++j) comb += y[j] * v[j];
    return Vector(prec.solve(comb));
  };

  for (Index k = 1;; ++k) {
    Vector w = kmul(prec.solve(v[k - 1]));
    Vector h = Vector::Zero(k + 1);
    const int passes = cfg.reorthogonalize ? 2 : 1;
    for (int pass = 0; pass < passes; ++pass) {
      for (Index j = 0; j < k; ++j) {
        const double hj = v[j].dot(w);
        h[j] += hj;
        w -= hj * v[j];
      }
    }
    const double hnext = w.norm();
    h[k] = hnext;
    for (Index j = 0; j + 1 < k; ++j) {
      const double t = cs[j] * h[j] + sn[j] * h[j + 1];
      h[j + 1] = -sn[j] * h[j] + cs[j] * h[j + 1];
      h[j] = t;
    }
    const double rho = std::hypot(h[k - 1], h[k]);
    if (!(rho > 0.0)) {
      res.termination = Termination::Breakdown;
      res.iterations = k - 1;
      break;
    }
    cs.push_back(h[k - 1] / rho);
    sn.push_back(h[k] / rho);
    h[k - 1] = rho;
    h[k] = 0.0;
    gvec.push_back(-sn.back() * gvec[k - 1]);
    gvec[k - 1] *= cs.back();
    r_cols.push_back(h);

    ConvergenceRecord rec;
    rec.k = k;
    rec.res_rel = std::abs(gvec[k]) / beta1;
    rec.alpha = rho;
    rec.beta_next = hnext;
    rec.scalar = gvec[k];
    rec.wall_time = seconds_since(t0);
    res.history.push_back(rec);
    res.iterations = k;
    if (cfg.record_iterates) {
      const Vector x = current_x(k);
      res.u_iterates.push_back(x.head(m));
      res.p_iterates.push_back(x.tail(nn));
    }

    if (hnext <= cfg.breakdown_tolerance * beta1) {
      res.termination = Termination::ExactTermination;
      break;
    }
    if (rec.res_rel < cfg.tolerance) {
      res.termination = Termination::Converged;
      res.stop_reason = StopReason::Residual;
      break;
    }
    if (k >= cfg.max_iterations) {
      res.termination = Termination::MaxIterations;
      break;
    }
    v.push_back(w / hnext);
  }

  Vector x = res.iterations > 0 ? current_x(res.iterations) : Vector(Vector::Zero(m + nn));
  finish(res, std::move(x), m, t0);
  return res;
}

std::pair<Vector, Vector> direct_solve(const SaddleSystem& sys) {
  return direct_solve(sys, Vector::Zero(sys.m_size()), sys.b());
}

std::pair<Vector, Vector> direct_solve(const SaddleSystem& sys, const Vector& f, const Vector& g) {
  const Index m = sys.m_size();
  const Index n = sys.n_size();
  if (m + n > 5000) throw Error(ErrorCode::Unsupported, "direct_solve is limited to m + n <= 5000");
  if (f.size() != m || g.size() != n) throw Error(ErrorCode::DimensionMismatch, "right-hand side blocks have wrong length");
  const FactorizedOperator lu = factorize(FactorKind::LuGeneral, sys.full_matrix().to_dense());
  const Vector rhs = stack(f, g);
  const Vector z = lu.solve(rhs);
  return {z.head(m), z.tail(n)};
}

}  // namespace gsp
