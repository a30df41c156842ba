#include "gsp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace gsp {

namespace {

DenseMatrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  DenseMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = dist(rng);
  return out;
}

// Each entry kept with probability `density`; at least one entry per column.
DenseMatrix sparse_gaussian(Index rows, Index cols, double density, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<Index> pick(0, rows - 1);
  DenseMatrix out = DenseMatrix::Zero(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i)
      if (coin(rng) < density) out(i, j) = dist(rng);
    if (out.col(j).isZero(0.0)) out(pick(rng), j) = dist(rng);
  }
  return out;
}

DenseMatrix symmetrize(const DenseMatrix& x) { return 0.5 * (x + x.transpose()); }

bool full_column_rank(const DenseMatrix& a) {
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(a);
  qr.setThreshold(1e-10);
  return qr.rank() == a.cols();
}

}  // namespace

void RandomSpec::validate() const {
  if (n < 1 || m < n) throw Error(ErrorCode::InvalidInput, "random spec requires 1 <= n <= m");
  if (!(density > 0.0 && density <= 1.0)) throw Error(ErrorCode::InvalidInput, "density must be in (0, 1]");
  if (!(lo > 0.0 && hi >= lo)) throw Error(ErrorCode::InvalidInput, "spectrum needs 0 < lo <= hi");
  if (!(skew >= 0.0)) throw Error(ErrorCode::InvalidInput, "skew strength must be >= 0");
  if (c_rank < 0 || c_rank > n) throw Error(ErrorCode::InvalidInput, "c-rank must be in [0, n]");
}

SaddleSystem gen_random(const RandomSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const Index m = spec.m;
  const Index n = spec.n;

  const Eigen::HouseholderQR<DenseMatrix> qr(gaussian(m, m, rng));
  const DenseMatrix q = qr.householderQ();
  std::uniform_real_distribution<double> spectrum(spec.lo, spec.hi);
  Vector lambda(m);
  for (Index i = 0; i < m; ++i) lambda[i] = spectrum(rng);
  DenseMatrix mmat = symmetrize(q * lambda.asDiagonal() * q.transpose());
  if (spec.skew > 0.0) {
    const DenseMatrix k = sparse_gaussian(m, m, spec.density, rng) /
                          std::sqrt(std::max(1.0, spec.density * static_cast<double>(m)));
    mmat += spec.skew * (k - k.transpose());
  }

  DenseMatrix a = sparse_gaussian(m, n, spec.density, rng);
  for (int attempt = 0; !full_column_rank(a); ++attempt) {
    if (attempt == 3)
      throw Error(ErrorCode::RankRepair, "could not repair the rank of A at density " + std::to_string(spec.density));
    const Eigen::JacobiSVD<DenseMatrix> svd(a);
    const double boost = std::max(1.0, svd.singularValues()[0]);
    for (Index j = 0; j < n; ++j) a(j, j) += boost;
  }

  DenseMatrix c = DenseMatrix::Zero(n, n);
  if (spec.c_rank > 0) {
    const DenseMatrix e = gaussian(spec.c_rank, n, rng) / std::sqrt(static_cast<double>(n));
    std::uniform_real_distribution<double> weight(0.5, 1.5);
    Vector f(spec.c_rank);
    for (Index i = 0; i < spec.c_rank; ++i) f[i] = weight(rng);
    c = symmetrize(e.transpose() * f.asDiagonal() * e);
  }

  Vector b = gaussian(n, 1, rng).col(0);
  return SaddleSystem::create(SparseMatrix::from_dense(mmat), SparseMatrix::from_dense(a), SparseMatrix::from_dense(c),
                              std::move(b), spec.skew == 0.0);
}

SpdPreconditioner random_diagonal_preconditioner(Index n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector d(n);
  for (Index i = 0; i < n; ++i) d[i] = dist(rng);
  return SpdPreconditioner::diagonal(d);
}

void StokesSpec::validate() const {
  if (nx < 2 || ny < 2) throw Error(ErrorCode::InvalidInput, "Stokes grid needs nx, ny >= 2");
  if (!(length > 0.0)) throw Error(ErrorCode::InvalidInput, "channel length must be positive");
  if (!(viscosity > 0.0)) throw Error(ErrorCode::InvalidInput, "viscosity must be positive");
  if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidInput, "stabilization gamma must be >= 0");
  if (!(wind_strength >= 0.0)) throw Error(ErrorCode::InvalidInput, "wind strength must be >= 0");
}

StokesProblem gen_stokes_channel(const StokesSpec& spec) {
  spec.validate();
  const Index nx = spec.nx;
  const Index ny = spec.ny;
  const double hx = spec.length / static_cast<double>(nx);
  const double hy = 1.0 / static_cast<double>(ny);
  const double area = hx * hy;
  const double nu = spec.viscosity;

  // Unknown numbering: u-faces (i = 1..nx-1, j = 0..ny-1), then v-faces
  // (i = 0..nx-1, j = 1..ny-1); pressure cells (i, j) with cell 0 pinned.
  const Index nu_faces = (nx - 1) * ny;
  const Index m = nu_faces + nx * (ny - 1);
  const Index n = nx * ny - 1;
  auto uid = [&](Index i, Index j) { return (j * (nx - 1)) + (i - 1); };
  auto vid = [&](Index i, Index j) { return nu_faces + (j - 1) * nx + i; };
  auto pid = [&](Index i, Index j) { return j * nx + i - 1; };

  auto wind_x = [&](double y) {
    switch (spec.wind) {
      case Wind::None: return 0.0;
      case Wind::Poiseuille: return spec.wind_strength * 4.0 * y * (1.0 - y);
      case Wind::Uniform: return spec.wind_strength;
    }
    return 0.0;
  };

  std::vector<Triplet> mt;
  const double cx = nu * area / (hx * hx);
  const double cy = nu * area / (hy * hy);

  // u-faces: Dirichlet neighbours in x are on the boundary, ghost reflection in y.
  for (Index j = 0; j < ny; ++j) {
    const double y = (static_cast<double>(j) + 0.5) * hy;
    const double wx = wind_x(y);
    for (Index i = 1; i < nx; ++i) {
      const Index row = uid(i, j);
      double diag = 2.0 * cx + 2.0 * cy;
      if (i > 1) mt.push_back({row, uid(i - 1, j), -cx});
      if (i < nx - 1) mt.push_back({row, uid(i + 1, j), -cx});
      if (j > 0) mt.push_back({row, uid(i, j - 1), -cy}); else diag += cy;
      if (j < ny - 1) mt.push_back({row, uid(i, j + 1), -cy}); else diag += cy;
      if (wx > 0.0) {
        diag += wx * area / hx;
        if (i > 1) mt.push_back({row, uid(i - 1, j), -wx * area / hx});
      }
      mt.push_back({row, row, diag});
    }
  }
  // v-faces: ghost reflection in x, Dirichlet neighbours in y.
  for (Index j = 1; j < ny; ++j) {
    const double wx = wind_x(static_cast<double>(j) * hy);
    for (Index i = 0; i < nx; ++i) {
      const Index row = vid(i, j);
      double diag = 2.0 * cx + 2.0 * cy;
      if (i > 0) mt.push_back({row, vid(i - 1, j), -cx}); else diag += cx;
      if (i < nx - 1) mt.push_back({row, vid(i + 1, j), -cx}); else diag += cx;
      if (j > 1) mt.push_back({row, vid(i, j - 1), -cy});
      if (j < ny - 1) mt.push_back({row, vid(i, j + 1), -cy});
      if (wx > 0.0) {
        if (i > 0) {
          diag += wx * area / hx;
          mt.push_back({row, vid(i - 1, j), -wx * area / hx});
        } else {
          diag += 2.0 * wx * area / hx;
        }
      }
      mt.push_back({row, row, diag});
    }
  }

  // A = discrete gradient scaled by the cell area.
  std::vector<Triplet> at;
  auto add_grad = [&](Index row, Index i, Index j, double value) {
    const Index col = pid(i, j);
    if (col >= 0) at.push_back({row, col, value});
  };
  for (Index j = 0; j < ny; ++j)
    for (Index i = 1; i < nx; ++i) {
      add_grad(uid(i, j), i, j, area / hx);
      add_grad(uid(i, j), i - 1, j, -area / hx);
    }
  for (Index j = 1; j < ny; ++j)
    for (Index i = 0; i < nx; ++i) {
      add_grad(vid(i, j), i, j, area / hy);
      add_grad(vid(i, j), i, j - 1, -area / hy);
    }

  // C = gamma h^2 times the area-scaled Neumann pressure Laplacian, pinned.
  std::vector<Triplet> ct;
  if (spec.gamma > 0.0) {
    const double scale = spec.gamma * area;
    const double kx = scale * area / (hx * hx);
    const double ky = scale * area / (hy * hy);
    auto couple = [&](Index i0, Index j0, Index i1, Index j1, double k) {
      const Index a0 = pid(i0, j0);
      const Index a1 = pid(i1, j1);
      if (a0 >= 0) ct.push_back({a0, a0, k});
      if (a1 >= 0) ct.push_back({a1, a1, k});
      if (a0 >= 0 && a1 >= 0) {
        ct.push_back({a0, a1, -k});
        ct.push_back({a1, a0, -k});
      }
    };
    for (Index j = 0; j < ny; ++j)
      for (Index i = 0; i + 1 < nx; ++i) couple(i, j, i + 1, j, kx);
    for (Index j = 0; j + 1 < ny; ++j)
      for (Index i = 0; i < nx; ++i) couple(i, j, i, j + 1, ky);
  }

  SparseMatrix mmat = SparseMatrix::from_triplets(m, m, std::move(mt));
  SparseMatrix amat = SparseMatrix::from_triplets(m, n, std::move(at));
  SparseMatrix cmat = SparseMatrix::from_triplets(n, n, std::move(ct));

  // Manufactured Poiseuille flow: u = 4y(1-y), v = 0, p = -8 nu x (zero in the pinned cell).
  Vector w_exact = Vector::Zero(m);
  for (Index j = 0; j < ny; ++j) {
    const double y = (static_cast<double>(j) + 0.5) * hy;
    for (Index i = 1; i < nx; ++i) w_exact[uid(i, j)] = 4.0 * y * (1.0 - y);
  }
  Vector p_exact(n);
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i)
      if (pid(i, j) >= 0) p_exact[pid(i, j)] = -8.0 * nu * static_cast<double>(i) * hx;

  const Vector f = mmat.multiply(w_exact) + amat.multiply(p_exact);
  const Vector g = amat.multiply_transpose(w_exact) - cmat.multiply(p_exact);

  const bool symmetric = spec.wind == Wind::None || spec.wind_strength == 0.0;
  const FactorizedOperator msolve = factorize(symmetric ? FactorKind::CholeskySpd : FactorKind::LuGeneral, mmat);
  Vector w0 = msolve.solve(f);
  Vector b = g - amat.multiply_transpose(w0);
  SaddleSystem sys = SaddleSystem::create(std::move(mmat), std::move(amat), std::move(cmat), std::move(b), symmetric);

  const double pscale = spec.wind == Wind::None ? area : area / nu;
  return StokesProblem{std::move(sys), SpdPreconditioner::diagonal(Vector::Constant(n, pscale)), std::move(w_exact),
                       std::move(p_exact), std::move(w0)};
}

CompressedSystem compress_rhs(SparseMatrix m, SparseMatrix a, SparseMatrix c, const Vector& b1, const Vector& b2) {
  if (b1.size() != a.rows() || b2.size() != a.cols())
    throw Error(ErrorCode::DimensionMismatch, "right-hand side blocks have wrong length");
  const bool symmetric = m.rows() == m.cols() && m.relative_asymmetry() <= 1e-12;
  // The system is created with a placeholder rhs first so that M is factorized once.
  SaddleSystem base = SaddleSystem::create(std::move(m), std::move(a), std::move(c), b2, symmetric);
  Vector w0 = base.m_solver().solve(b1);
  Vector b = b2 - base.a().multiply_transpose(w0);
  return CompressedSystem{base.with_rhs(std::move(b)), std::move(w0)};
}

HypothesisReport check_hypotheses(const SaddleSystem& sys, double tolerance) {
  HypothesisReport rep;
  rep.tolerance = tolerance;
  const DenseMatrix m = sys.m().to_dense();
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> meig(symmetrize(m), Eigen::EigenvaluesOnly);
  rep.m_symmetric_part_min_eig = meig.eigenvalues()[0];
  rep.m_positive_definite = rep.m_symmetric_part_min_eig > tolerance * std::max(1.0, meig.eigenvalues().maxCoeff());

  Eigen::ColPivHouseholderQR<DenseMatrix> qr(sys.a().to_dense());
  qr.setThreshold(tolerance);
  rep.a_rank = qr.rank();
  rep.a_full_rank = rep.a_rank == sys.n_size();

  const DenseMatrix c = sys.c().to_dense();
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> ceig(symmetrize(c), Eigen::EigenvaluesOnly);
  rep.c_min_eig = ceig.eigenvalues()[0];
  rep.c_semidefinite = rep.c_min_eig >= -tolerance * std::max(1.0, ceig.eigenvalues().cwiseAbs().maxCoeff());
  return rep;
}

}  // namespace gsp
