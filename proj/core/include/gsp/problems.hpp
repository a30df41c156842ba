#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "gsp/linops.hpp"
#include "gsp/system.hpp"

namespace gsp {

struct RandomSpec {
  Index m = 8;
  Index n = 4;
  /// Fraction of nonzeros in A and in the skew perturbation K.
  double density = 1.0;
  /// Eigenvalues of the symmetric part of M are uniform in [lo, hi].
  double lo = 1.0;
  double hi = 2.0;
  /// 0 gives symmetric M; otherwise M gains skew * (K - K^T).
  double skew = 0.0;
  Index c_rank = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Deterministic in the seed. Throws RankRepair when A cannot be made full rank.
SaddleSystem gen_random(const RandomSpec& spec);

/// diag(d) with d_i uniform in [lo, hi].
SpdPreconditioner random_diagonal_preconditioner(Index n, std::uint64_t seed, double lo = 0.5, double hi = 2.0);

enum class Wind {
  None,        ///< Stokes
  Poiseuille,  ///< (4y(1-y), 0) scaled by wind_strength
  Uniform,     ///< (1, 0) scaled by wind_strength
};

struct StokesSpec {
  Index nx = 16;
  Index ny = 16;
  /// Channel length; the domain is [0, length] x [0, 1].
  double length = 1.0;
  double viscosity = 1.0;
  double gamma = 0.25;
  Wind wind = Wind::None;
  double wind_strength = 1.0;

  void validate() const;
};

struct StokesProblem {
  SaddleSystem system;
  /// Diagonal pressure mass (cell areas), divided by the viscosity when a wind is set.
  SpdPreconditioner preconditioner;
  /// Manufactured discrete velocity and pressure (pinned cell removed).
  Vector w_exact;
  Vector p_exact;
  /// M^{-1} f from the right-hand-side compression; w = u + w0.
  Vector w0;
};

/// Staggered-grid finite differences on the channel. m = (nx-1) ny + nx (ny-1),
/// n = nx ny - 1 (the first pressure cell is pinned to zero).
StokesProblem gen_stokes_channel(const StokesSpec& spec);

struct CompressedSystem {
  SaddleSystem system;
  Vector w0;
};

/// Turns the right-hand side (b1; b2) into (0; b2 - A^T M^{-1} b1).
CompressedSystem compress_rhs(SparseMatrix m, SparseMatrix a, SparseMatrix c, const Vector& b1, const Vector& b2);
inline Vector recover_w(const Vector& u, const Vector& w0) { return u + w0; }

/// Dense checks of the standing assumptions.
struct HypothesisReport {
  double m_symmetric_part_min_eig = 0.0;
  Index a_rank = 0;
  double c_min_eig = 0.0;
  /// Tolerance used for the rank and sign decisions.
  double tolerance = 0.0;
  bool m_positive_definite = false;
  bool a_full_rank = false;
  bool c_semidefinite = false;

  bool ok() const noexcept { return m_positive_definite && a_full_rank && c_semidefinite; }
};
HypothesisReport check_hypotheses(const SaddleSystem& sys, double tolerance = 1e-10);

// Matrix Market

SparseMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a);
/// Vectors are stored as dense n x 1 arrays.
Vector read_matrix_market_vector(const std::filesystem::path& path);
void write_matrix_market_vector(const std::filesystem::path& path, const Vector& v);

/// Parsed from text; used by the file readers.
SparseMatrix parse_matrix_market(const std::string& text);

// System bundle: a JSON manifest naming M, A, C, b (and optionally the diagonal of N).

struct Bundle {
  SaddleSystem system;
  std::optional<SpdPreconditioner> preconditioner;
};

/// Writes M.mtx, A.mtx, C.mtx, b.mtx, optional N.mtx and system.json into `dir`.
void write_bundle(const std::filesystem::path& dir, const SaddleSystem& sys,
                  const std::optional<SpdPreconditioner>& n = std::nullopt);
/// Reads a manifest; relative file names resolve against its directory.
Bundle read_bundle(const std::filesystem::path& manifest);

}  // namespace gsp
