#include "gsp/gkb.hpp"

#include <cmath>

#include "gsp/dense.hpp"

namespace gsp::gkb {

AugmentedSystem make_augmented(const SaddleSystem& sys, double rank_tolerance) {
  SpsdFactor ef = spsd_factor(sys.c(), rank_tolerance);
  if (ef.rank == 0) throw Error(ErrorCode::DegenerateC, "C = O has no augmented form (l = 0)");
  FactorizedOperator f_op = factorize_diagonal(ef.f.diagonal());
  return AugmentedSystem{sys.m_solver(), std::move(ef.f), std::move(f_op), sys.a(),
                         std::move(ef.e),  sys.b(),      sys.symmetric()};
}

DenseMatrix BidiagFactors::bidiagonal() const { return dense::upper_bidiagonal(alphas, betas, steps()); }

DenseMatrix BidiagFactors::hessenberg() const {
  if (hessenberg_columns.empty()) return bidiagonal().transpose();
  return dense::upper_hessenberg(hessenberg_columns, betas, steps());
}

namespace {

struct LeftVector {
  Vector x;
  Vector c;
};

/// ||wbar||_Mbar^2 = w_x^T M w_x + w_c^T F^{-1} w_c
double mbar_norm(const AugmentedSystem& aug, const LeftVector& w) {
  const double sq = w.x.dot(aug.m.apply(w.x)) + w.c.dot(aug.f_op.solve(w.c));
  return checked_sqrt(sq, w.x.squaredNorm() + w.c.squaredNorm());
}

/// N^{-1} Abar^T vbar
Vector right_image(const AugmentedSystem& aug, const SpdPreconditioner& n, const LeftVector& v) {
  return n.solve(aug.a.multiply_transpose(v.x) + aug.e.transpose() * v.c);
}

/// Mbar^{-1} (Abar q - beta Mbar vbar)
LeftVector left_image(const AugmentedSystem& aug, const Vector& q, double beta, const LeftVector* prev) {
  LeftVector w;
  Vector ax = aug.a.multiply(q);
  Vector ec = aug.e * q;
  if (prev != nullptr) {
    ax -= beta * aug.m.apply(prev->x);
    ec -= beta * aug.f_op.solve(prev->c);
  }
  w.x = aug.m.solve(ax);
  w.c = aug.f_op.apply(ec);
  return w;
}

void mgs_pass(const std::vector<Vector>& q, const SpdPreconditioner& n, Vector& g, Vector* h) {
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double coef = weighted_inner(n, q[j], g);
    g -= coef * q[j];
    if (h != nullptr) (*h)[static_cast<Index>(j)] += coef;
  }
}

GkbResult run(const AugmentedSystem& aug, const SpdPreconditioner& n, Index steps, const GkbOptions& options,
              bool symmetric) {
  if (n.dimension() != aug.n_size())
    throw Error(ErrorCode::DimensionMismatch, "preconditioner must be n x n");
  if (aug.l_size() == 0) throw Error(ErrorCode::DegenerateC, "augmented system requires l >= 1");
  if (steps < 1 || steps > aug.n_size())
    throw Error(ErrorCode::InvalidInput, "steps must lie in [1, n]");

  GkbResult out;
  auto& basis = out.basis;
  auto& fac = out.factors;

  Vector nb = n.solve(aug.b);
  const double beta1 = checked_sqrt(aug.b.dot(nb), aug.b.squaredNorm());
  if (!(beta1 > 0.0)) throw Error(ErrorCode::ZeroRhs, "right-hand side b is zero");
  fac.betas.push_back(beta1);
  Vector q = nb / beta1;

  LeftVector w = left_image(aug, q, 0.0, nullptr);
  double alpha = mbar_norm(aug, w);
  if (!(alpha > 0.0)) throw Error(ErrorCode::Breakdown, "alpha_1 = 0");
  const double alpha1 = alpha;
  LeftVector v{w.x / alpha, w.c / alpha};

  for (Index k = 1;; ++k) {
    basis.q.push_back(q);
    basis.vx.push_back(v.x);
    basis.vc.push_back(v.c);
    fac.alphas.push_back(alpha);

    Vector g = right_image(aug, n, v);
    if (symmetric) {
      g -= alpha * q;
      if (options.reorthogonalize) mgs_pass(basis.q, n, g, nullptr);
    } else {
      Vector h = Vector::Zero(k);
      mgs_pass(basis.q, n, g, &h);
      if (options.reorthogonalize) mgs_pass(basis.q, n, g, &h);
      fac.hessenberg_columns.push_back(std::move(h));
    }
    const double beta = weighted_norm(n, g);
    fac.betas.push_back(beta);

    if (beta <= options.breakdown_tolerance * beta1) {
      out.exact_termination = true;
      basis.q_next = Vector::Zero(aug.n_size());
      break;
    }
    q = g / beta;
    if (k == steps) {
      basis.q_next = q;
      break;
    }

    w = left_image(aug, q, beta, &v);
    alpha = mbar_norm(aug, w);
    if (!(alpha > options.breakdown_tolerance * alpha1))
      throw Error(ErrorCode::Breakdown, "alpha_" + std::to_string(k + 1) + " below breakdown tolerance");
    v = LeftVector{w.x / alpha, w.c / alpha};
  }

  if (!symmetric)
    fac.lower = dense::lower_factor_from_hessenberg(fac.alphas, fac.betas, fac.hessenberg());
  return out;
}

DenseMatrix columns(const std::vector<Vector>& vs, Index rows) {
  DenseMatrix out(rows, static_cast<Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) out.col(static_cast<Index>(j)) = vs[j];
  return out;
}

}  // namespace

GkbResult gkb_symmetric(const AugmentedSystem& aug, const SpdPreconditioner& n, Index steps,
                        const GkbOptions& options) {
  if (!aug.symmetric) throw Error(ErrorCode::WrongSolver, "gkb_symmetric requires symmetric M");
  return run(aug, n, steps, options, true);
}

GkbResult gkb_nonsymmetric(const AugmentedSystem& aug, const SpdPreconditioner& n, Index steps,
                           const GkbOptions& options) {
  return run(aug, n, steps, options, false);
}

DecompositionReport verify_decomposition(const AugmentedSystem& aug, const SpdPreconditioner& n,
                                         const GkbBasis& basis, const BidiagFactors& factors,
                                         bool symmetric) {
  const Index k = factors.steps();
  const Index m = aug.m_size();
  const Index nn = aug.n_size();
  const Index l = aug.l_size();

  DecompositionReport rep;
  rep.steps = k;
  rep.scale = aug.a.frobenius_norm() + aug.e.norm();

  const DenseMatrix q = columns(basis.q, nn);
  const DenseMatrix vx = columns(basis.vx, m);
  const DenseMatrix vc = columns(basis.vc, l);
  const DenseMatrix b = factors.bidiagonal();
  const DenseMatrix h = symmetric ? DenseMatrix(b.transpose()) : factors.hessenberg();
  const DenseMatrix a_dense = aug.a.to_dense();
  const DenseMatrix m_dense = aug.m.dense();
  const DenseMatrix n_dense = n.dense();
  const DenseMatrix f_inv = aug.f_op.solve(Vector::Ones(l)).asDiagonal();

  // Abar Q = Mbar Vbar B
  const DenseMatrix left_x = a_dense * q - m_dense * vx * b;
  const DenseMatrix left_c = aug.e * q - f_inv * vc * b;
  rep.left_residual = std::sqrt(left_x.squaredNorm() + left_c.squaredNorm());

  // Abar^T Vbar = N Q H + beta_{k+1} N q_{k+1} e_k^T
  DenseMatrix right = a_dense.transpose() * vx + aug.e.transpose() * vc - n_dense * q * h;
  right.col(k - 1) -= factors.betas[static_cast<std::size_t>(k)] * (n_dense * basis.q_next);
  rep.right_residual = right.norm();

  rep.q_orthogonality = (q.transpose() * n_dense * q - DenseMatrix::Identity(k, k)).norm();

  const DenseMatrix gram = vx.transpose() * m_dense * vx + vc.transpose() * f_inv * vc;
  if (symmetric) {
    rep.v_orthogonality = (gram - DenseMatrix::Identity(k, k)).norm();
    rep.factor_identity = 0.0;
  } else {
    const DenseMatrix l_from_h = factors.lower ? *factors.lower
                                               : dense::lower_factor_from_hessenberg(factors.alphas, factors.betas, h);
    rep.v_orthogonality = (gram - l_from_h).norm();
    DenseMatrix l_from_basis = gram.triangularView<Eigen::StrictlyLower>();
    l_from_basis.diagonal().setOnes();
    rep.factor_identity = (h - b.transpose() * l_from_basis.transpose()).norm() / h.norm();
  }

  if (nn <= 2000) {
    DenseMatrix minv_a(m, nn);
    for (Index j = 0; j < nn; ++j) minv_a.col(j) = aug.m.solve(a_dense.col(j));
    const DenseMatrix s = a_dense.transpose() * minv_a + aug.e.transpose() * aug.f * aug.e;
    const DenseMatrix projected = q.transpose() * s * q;
    const DenseMatrix reduced = symmetric ? DenseMatrix(b.transpose() * b) : DenseMatrix(h * b);
    rep.schur_projection = (reduced - projected).norm() / projected.norm();
  }
  return rep;
}

}  // namespace gsp::gkb
