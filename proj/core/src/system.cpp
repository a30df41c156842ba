#include "gsp/system.hpp"

#include <chrono>
#include <string>

namespace gsp {

SaddleSystem SaddleSystem::create(SparseMatrix m, SparseMatrix a, SparseMatrix c, Vector b) {
  const bool symmetric = m.rows() == m.cols() && m.relative_asymmetry() <= 1e-12;
  return create(std::move(m), std::move(a), std::move(c), std::move(b), symmetric);
}

SaddleSystem SaddleSystem::create(SparseMatrix m, SparseMatrix a, SparseMatrix c, Vector b, bool symmetric) {
  const Index rows = a.rows();
  const Index cols = a.cols();
  if (cols < 1 || rows < cols)
    throw Error(ErrorCode::DimensionMismatch, "saddle system requires m >= n >= 1, got m=" +
                                                  std::to_string(rows) + " n=" + std::to_string(cols));
  if (m.rows() != rows || m.cols() != rows) throw Error(ErrorCode::DimensionMismatch, "M must be m x m");
  if (c.rows() != cols || c.cols() != cols) throw Error(ErrorCode::DimensionMismatch, "C must be n x n");
  if (b.size() != cols) throw Error(ErrorCode::DimensionMismatch, "b must have length n");
  if (!b.allFinite()) throw Error(ErrorCode::InvalidInput, "b contains NaN/Inf");
  if (c.relative_asymmetry() > 1e-12) throw Error(ErrorCode::Asymmetric, "C must be symmetric");
  if (symmetric && m.relative_asymmetry() > 1e-12)
    throw Error(ErrorCode::Asymmetric, "symmetric flag set but M is not symmetric");

  const auto start = std::chrono::steady_clock::now();
  FactorizedOperator solver = factorize(symmetric ? FactorKind::CholeskySpd : FactorKind::LuGeneral, m);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  return SaddleSystem(std::make_shared<const Data>(Data{std::move(m), std::move(a), std::move(c),
                                                        std::move(b), std::move(solver), symmetric, seconds}));
}

SaddleSystem SaddleSystem::with_rhs(Vector b) const {
  if (b.size() != n_size()) throw Error(ErrorCode::DimensionMismatch, "b must have length n");
  Data copy = *data_;
  copy.b = std::move(b);
  return SaddleSystem(std::make_shared<const Data>(std::move(copy)));
}

SparseMatrix SaddleSystem::full_matrix() const {
  const Index m = m_size();
  const Index n = n_size();
  std::vector<Triplet> t;
  for (const auto& e : data_->m.triplets()) t.push_back(e);
  for (const auto& e : data_->a.triplets()) {
    t.push_back({e.row, m + e.col, e.value});
    t.push_back({m + e.col, e.row, e.value});
  }
  for (const auto& e : data_->c.triplets()) t.push_back({m + e.row, m + e.col, -e.value});
  return SparseMatrix::from_triplets(m + n, m + n, std::move(t));
}

Vector SaddleSystem::full_apply(const Vector& u, const Vector& p) const {
  Vector out(m_size() + n_size());
  out.head(m_size()) = data_->m.multiply(u) + data_->a.multiply(p);
  out.tail(n_size()) = data_->a.multiply_transpose(u) - data_->c.multiply(p);
  return out;
}

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidInput, "max-iterations must be >= 1");
  if (criterion != StoppingCriterion::RelativeResidual && delay < 1)
    throw Error(ErrorCode::InvalidInput, "error-estimate delay must be >= 1");
  if (!(breakdown_tolerance >= 0.0)) throw Error(ErrorCode::InvalidInput, "breakdown tolerance must be >= 0");
}

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::Breakdown: return "breakdown";
    case Termination::ExactTermination: return "exact-termination";
  }
  return "unknown";
}

const char* to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::None: return "none";
    case StopReason::Residual: return "relative-residual";
    case StopReason::ErrorEstimate: return "error-estimate";
  }
  return "unknown";
}

const char* to_string(StoppingCriterion c) noexcept {
  switch (c) {
    case StoppingCriterion::RelativeResidual: return "relative-residual";
    case StoppingCriterion::ErrorEstimate: return "error-estimate";
    case StoppingCriterion::Either: return "either";
  }
  return "unknown";
}

}  // namespace gsp
