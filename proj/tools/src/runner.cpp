#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gsp/baselines.hpp"
#include "gsp/craig.hpp"
#include "gsp/diagnostics.hpp"
#include "gsp/nscraig.hpp"

#include "gsp_cli/runner.hpp"

namespace gsp::cli {

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << text;
}

SolveResult dispatch(SolverKind kind, const Instance& inst, const SolverConfig& cfg) {
  switch (kind) {
    case SolverKind::Craig: return craig_solve(inst.system, inst.preconditioner, cfg);
    case SolverKind::NsCraig: return nscraig_solve(inst.system, inst.preconditioner, cfg);
    case SolverKind::ScrCg: return scr_cg_solve(inst.system, inst.preconditioner, cfg);
    case SolverKind::ScrFom: return scr_fom_solve(inst.system, inst.preconditioner, cfg);
    case SolverKind::Pminres: return pminres_solve(inst.system, inst.preconditioner, cfg);
    case SolverKind::Pgmres: return pgmres_solve(inst.system, inst.preconditioner, cfg);
  }
  throw Error(ErrorCode::Usage, "unknown solver");
}

int exit_code(const std::vector<SolverReport>& reports) {
  for (const auto& r : reports)
    if (!r.converged()) return kExitNotConverged;
  return kExitOk;
}

void write_outputs(const RunManifest& manifest, const std::vector<SolverReport>& reports, std::ostream& log) {
  std::filesystem::create_directories(manifest.output_dir);
  std::string summary;
  for (const auto& r : reports) {
    if (r.result) write_text(manifest.output_dir / (std::string(to_string(r.kind)) + "_history.csv"), history_csv(*r.result));
    summary += summary_line(r) + "\n";
  }
  write_text(manifest.output_dir / "summary.txt", summary);
  log << summary;
}

}  // namespace

Instance build_instance(const ProblemSource& source) {
  switch (source.kind) {
    case SourceKind::Random: {
      SaddleSystem sys = gen_random(source.random);
      const Index n = sys.n_size();
      SpdPreconditioner prec = source.preconditioner == "random-diagonal"
                                   ? random_diagonal_preconditioner(n, source.random.seed + 1)
                                   : SpdPreconditioner::identity(n);
      return Instance{std::move(sys), std::move(prec)};
    }
    case SourceKind::Stokes: {
      StokesProblem p = gen_stokes_channel(source.stokes);
      return Instance{std::move(p.system), std::move(p.preconditioner)};
    }
    case SourceKind::Load: {
      Bundle b = read_bundle(source.path);
      SpdPreconditioner prec = b.preconditioner ? *b.preconditioner : SpdPreconditioner::identity(b.system.n_size());
      return Instance{std::move(b.system), std::move(prec)};
    }
  }
  throw Error(ErrorCode::Usage, "unknown problem source");
}

void check_compatibility(const std::vector<SolverKind>& solvers, const SaddleSystem& sys) {
  if (sys.symmetric()) return;
  for (SolverKind s : solvers)
    if (requires_symmetric(s))
      throw Error(ErrorCode::Usage, std::string("solver ") + to_string(s) + " requires symmetric M but the system is nonsymmetric");
}

std::vector<SolverReport> run_solvers(const RunManifest& manifest, const Instance& inst) {
  check_compatibility(manifest.solvers, inst.system);
  std::optional<std::pair<Vector, Vector>> oracle;
  if (manifest.report_error_vs_oracle) oracle = direct_solve(inst.system);

  std::vector<SolverReport> reports;
  for (SolverKind kind : manifest.solvers) {
    SolverReport rep{kind, std::nullopt, {}, std::nullopt, 0.0, inst.system.factorization_seconds()};
    try {
      rep.result = dispatch(kind, inst, manifest.config);
      rep.res_full = relative_full_residual(inst.system, rep.result->u, rep.result->p);
      if (oracle) rep.err = relative_error(oracle->first, oracle->second, rep.result->u, rep.result->p);
    } catch (const Error& e) {
      rep.failure = std::string(gsp::to_string(e.code())) + ": " + e.what();
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::string history_csv(const SolveResult& result) {
  std::string out = "k,res_rel,err_est,alpha,beta_next,scalar,wall_time_s\n";
  for (const auto& rec : result.history) {
    out += std::to_string(rec.k) + "," + g17(rec.res_rel) + "," + (rec.err_est ? g17(*rec.err_est) : "") + "," +
           g17(rec.alpha) + "," + g17(rec.beta_next) + "," + g17(rec.scalar) + "," + g17(rec.wall_time) + "\n";
  }
  return out;
}

std::string summary_line(const SolverReport& r) {
  std::string out = std::string("solver=") + to_string(r.kind);
  if (!r.result) return out + " termination=error message=\"" + r.failure + "\"";
  const SolveResult& s = *r.result;
  const double res_rel = s.history.empty() ? 1.0 : s.history.back().res_rel;
  out += " iterations=" + std::to_string(s.iterations);
  out += " seconds=" + g17(s.solve_seconds);
  out += " factorization_seconds=" + g17(r.factorization_seconds);
  if (r.err) out += " err=" + g17(*r.err);
  out += " res_rel=" + g17(res_rel);
  out += " res_full=" + g17(r.res_full);
  out += std::string(" termination=") + gsp::to_string(s.termination);
  return out;
}

namespace {

struct Cell {
  std::string iterations, time, err;
};

Cell cell_for(const SolverReport& r) {
  if (!r.converged()) return {"-", "-", "-"};
  return {std::to_string(r.result->iterations), short_num(r.result->solve_seconds), r.err ? short_num(*r.err) : "n/a"};
}

}  // namespace

std::string comparison_text(const std::vector<SolverReport>& reports) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-12s", "");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%12s", to_string(r.kind));
    out << buf;
  }
  out << "\n";
  const char* labels[] = {"iterations", "time", "ERR"};
  for (int row = 0; row < 3; ++row) {
    std::snprintf(buf, sizeof buf, "%-12s", labels[row]);
    out << buf;
    for (const auto& r : reports) {
      const Cell c = cell_for(r);
      const std::string& v = row == 0 ? c.iterations : row == 1 ? c.time : c.err;
      std::snprintf(buf, sizeof buf, "%12s", v.c_str());
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

std::string comparison_csv(const std::vector<SolverReport>& reports) {
  std::string out = "metric";
  for (const auto& r : reports) out += std::string(",") + to_string(r.kind);
  out += "\n";
  const char* labels[] = {"iterations", "time", "ERR"};
  for (int row = 0; row < 3; ++row) {
    out += labels[row];
    for (const auto& r : reports) {
      const Cell c = cell_for(r);
      out += "," + (row == 0 ? c.iterations : row == 1 ? c.time : c.err);
    }
    out += "\n";
  }
  return out;
}

int run_command(const RunManifest& manifest, std::ostream& log) {
  const Instance inst = build_instance(manifest.problem);
  const auto reports = run_solvers(manifest, inst);
  write_outputs(manifest, reports, log);
  return exit_code(reports);
}

int compare_command(const RunManifest& manifest, std::ostream& log) {
  if (manifest.solvers.size() < 2) throw Error(ErrorCode::Usage, "compare needs at least two solvers");
  const Instance inst = build_instance(manifest.problem);
  const auto reports = run_solvers(manifest, inst);
  write_outputs(manifest, reports, log);
  const std::string table = comparison_text(reports);
  write_text(manifest.output_dir / "comparison.txt", table);
  write_text(manifest.output_dir / "comparison.csv", comparison_csv(reports));
  log << table;
  return exit_code(reports);
}

}  // namespace gsp::cli
