#include "gsp/diagnostics.hpp"

#include <cmath>
#include <string>

namespace gsp {

namespace {

std::vector<ResidualDefect> check(const SaddleSystem& sys, const SpdPreconditioner& n, const SolveResult& result,
                                  bool need_basis) {
  const auto steps = result.history.size();
  if (result.u_iterates.size() < steps || result.p_iterates.size() < steps)
    throw Error(ErrorCode::MissingHistory, "residual check needs recorded iterates (record_iterates)");
  if (need_basis && result.right_basis.size() < steps)
    throw Error(ErrorCode::MissingHistory, "residual check needs the right basis q_1..q_k");
  if (n.dimension() != sys.n_size()) throw Error(ErrorCode::DimensionMismatch, "preconditioner N must be n x n");

  const double beta1 = result.beta1;
  const double a_norm = sys.a().frobenius_norm();
  std::vector<ResidualDefect> out;
  out.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const ConvergenceRecord& rec = result.history[i];
    const Vector& u = result.u_iterates[i];
    const Vector& p = result.p_iterates[i];
    const Vector r = sys.b() - sys.a().multiply_transpose(u) + sys.c().multiply(p);

    ResidualDefect d;
    d.k = rec.k;
    d.explicit_norm = checked_sqrt(r.dot(n.solve(r)), r.squaredNorm());
    d.estimate = rec.beta_next * std::abs(rec.scalar);
    d.defect = std::abs(d.explicit_norm - d.estimate) / beta1;
    d.upper_block = (sys.m().multiply(u) + sys.a().multiply(p)).norm();
    d.upper_bound = a_norm * p.norm();
    if (result.right_basis.size() > i) {
      double worst = 0.0;
      for (std::size_t j = 0; j <= i; ++j) worst = std::max(worst, std::abs(result.right_basis[j].dot(r)));
      d.orthogonality = worst;
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace

std::vector<ResidualDefect> craig_residual_check(const SaddleSystem& sys, const SpdPreconditioner& n,
                                                 const SolveResult& result) {
  return check(sys, n, result, false);
}

std::vector<ResidualDefect> nscraig_residual_check(const SaddleSystem& sys, const SpdPreconditioner& n,
                                                   const SolveResult& result) {
  return check(sys, n, result, true);
}

double energy_error(const SaddleSystem& sys, const Vector& u_star, const Vector& p_star, const Vector& u,
                    const Vector& p) {
  const Vector du = u_star - u;
  const Vector dp = p_star - p;
  return du.dot(sys.m().multiply(du)) + dp.dot(sys.c().multiply(dp));
}

double relative_error(const Vector& u_star, const Vector& p_star, const Vector& u, const Vector& p) {
  const double ref = std::sqrt(u_star.squaredNorm() + p_star.squaredNorm());
  const double diff = std::sqrt((u_star - u).squaredNorm() + (p_star - p).squaredNorm());
  return ref > 0.0 ? diff / ref : diff;
}

double relative_full_residual(const SaddleSystem& sys, const Vector& u, const Vector& p) {
  Vector rhs = Vector::Zero(sys.m_size() + sys.n_size());
  rhs.tail(sys.n_size()) = sys.b();
  const double ref = rhs.norm();
  const double res = (rhs - sys.full_apply(u, p)).norm();
  return ref > 0.0 ? res / ref : res;
}

}  // namespace gsp
