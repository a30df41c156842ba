#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsp/problems.hpp"
#include "gsp/system.hpp"

namespace gsp::cli {

enum class SolverKind { Craig, NsCraig, ScrCg, ScrFom, Pminres, Pgmres };

std::optional<SolverKind> parse_solver(std::string_view name);
const char* to_string(SolverKind kind) noexcept;
/// craig, scr-cg and pminres need symmetric M.
bool requires_symmetric(SolverKind kind) noexcept;

enum class SourceKind { Random, Stokes, Load };

struct ProblemSource {
  SourceKind kind = SourceKind::Random;
  RandomSpec random;
  /// "identity" or "random-diagonal" (random problems only).
  std::string preconditioner = "identity";
  StokesSpec stokes;
  std::filesystem::path path;
};

struct RunManifest {
  ProblemSource problem;
  std::vector<SolverKind> solvers;
  SolverConfig config;
  std::filesystem::path output_dir = "gsp-out";
  bool report_error_vs_oracle = false;
};

/// Throws Error(Usage) on unknown keys, bad values or an empty solver list.
/// Relative paths are resolved against `base_dir`.
RunManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunManifest load_manifest(const std::filesystem::path& path);

struct Instance {
  SaddleSystem system;
  SpdPreconditioner preconditioner;
};

Instance build_instance(const ProblemSource& source);

/// Throws Error(Usage) when a solver needs symmetric M and the instance is not.
void check_compatibility(const std::vector<SolverKind>& solvers, const SaddleSystem& sys);

struct SolverReport {
  SolverKind kind;
  std::optional<SolveResult> result;
  /// Set when the solver threw.
  std::string failure;
  /// ||z - z*|| / ||z*|| against direct_solve, when requested.
  std::optional<double> err;
  /// ||[0; b] - K z|| / ||b||
  double res_full = 0.0;
  double factorization_seconds = 0.0;

  bool converged() const noexcept { return result && succeeded(result->termination); }
};

/// Runs the solvers one after another on the same instance.
std::vector<SolverReport> run_solvers(const RunManifest& manifest, const Instance& instance);

/// Header k,res_rel,err_est,alpha,beta_next,scalar,wall_time_s; doubles with 17 significant digits.
std::string history_csv(const SolveResult& result);
std::string summary_line(const SolverReport& report);
std::string comparison_text(const std::vector<SolverReport>& reports);
std::string comparison_csv(const std::vector<SolverReport>& reports);

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

/// Writes <solver>_history.csv and summary.txt; returns the exit code.
int run_command(const RunManifest& manifest, std::ostream& log);
/// As run_command, plus comparison.txt and comparison.csv. Needs >= 2 solvers.
int compare_command(const RunManifest& manifest, std::ostream& log);

}  // namespace gsp::cli
