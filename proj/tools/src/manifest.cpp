#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gsp_cli/runner.hpp"

namespace gsp::cli {

namespace {

using nlohmann::json;

[[noreturn]] void usage(const std::string& what) { throw Error(ErrorCode::Usage, what); }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) usage(where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items())
    if (!ok.count(item.key())) usage("unknown key '" + item.key() + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    usage(std::string("bad value for '") + key + "'");
  }
}

void read_index(const json& obj, const char* key, Index& out) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_number_integer()) usage(std::string("'") + key + "' must be an integer");
  out = obj.at(key).get<Index>();
}

ProblemSource parse_problem(const json& p, const std::filesystem::path& base) {
  if (!p.is_object() || !p.contains("source")) usage("problem.source is required");
  const std::string source = p.at("source").is_string() ? p.at("source").get<std::string>() : "";
  ProblemSource out;
  if (source == "random") {
    only_keys(p, "problem", {"source", "m", "n", "density", "lo", "hi", "skew", "c_rank", "seed", "preconditioner"});
    out.kind = SourceKind::Random;
    read_index(p, "m", out.random.m);
    read_index(p, "n", out.random.n);
    read(p, "density", out.random.density);
    read(p, "lo", out.random.lo);
    read(p, "hi", out.random.hi);
    read(p, "skew", out.random.skew);
    read_index(p, "c_rank", out.random.c_rank);
    read(p, "seed", out.random.seed);
    read(p, "preconditioner", out.preconditioner);
    if (out.preconditioner != "identity" && out.preconditioner != "random-diagonal")
      usage("problem.preconditioner must be 'identity' or 'random-diagonal'");
  } else if (source == "stokes") {
    only_keys(p, "problem", {"source", "nx", "ny", "length", "viscosity", "gamma", "wind", "wind_strength"});
    out.kind = SourceKind::Stokes;
    read_index(p, "nx", out.stokes.nx);
    read_index(p, "ny", out.stokes.ny);
    read(p, "length", out.stokes.length);
    read(p, "viscosity", out.stokes.viscosity);
    read(p, "gamma", out.stokes.gamma);
    read(p, "wind_strength", out.stokes.wind_strength);
    std::string wind = "none";
    read(p, "wind", wind);
    if (wind == "none") out.stokes.wind = Wind::None;
    else if (wind == "poiseuille") out.stokes.wind = Wind::Poiseuille;
    else if (wind == "uniform") out.stokes.wind = Wind::Uniform;
    else usage("problem.wind must be none, poiseuille or uniform");
  } else if (source == "load") {
    only_keys(p, "problem", {"source", "path"});
    out.kind = SourceKind::Load;
    std::string path;
    read(p, "path", path);
    if (path.empty()) usage("problem.path is required for source 'load'");
    out.path = base / path;
  } else {
    usage("problem.source must be random, stokes or load");
  }
  return out;
}

SolverConfig parse_config(const json& c) {
  only_keys(c, "config", {"tolerance", "max_iterations", "criterion", "delay", "reorthogonalize", "hessenberg_solve",
                          "breakdown_tolerance"});
  SolverConfig cfg;
  read(c, "tolerance", cfg.tolerance);
  read_index(c, "max_iterations", cfg.max_iterations);
  read_index(c, "delay", cfg.delay);
  read(c, "reorthogonalize", cfg.reorthogonalize);
  read(c, "breakdown_tolerance", cfg.breakdown_tolerance);
  std::string criterion = "residual";
  read(c, "criterion", criterion);
  if (criterion == "residual") cfg.criterion = StoppingCriterion::RelativeResidual;
  else if (criterion == "error-estimate") cfg.criterion = StoppingCriterion::ErrorEstimate;
  else if (criterion == "either") cfg.criterion = StoppingCriterion::Either;
  else usage("config.criterion must be residual, error-estimate or either");
  std::string hsolve = "factored";
  read(c, "hessenberg_solve", hsolve);
  if (hsolve == "factored") cfg.hessenberg_solve = HessenbergSolve::Factored;
  else if (hsolve == "dense") cfg.hessenberg_solve = HessenbergSolve::Dense;
  else usage("config.hessenberg_solve must be factored or dense");
  try {
    cfg.validate();
  } catch (const Error& e) {
    usage(e.what());
  }
  return cfg;
}

}  // namespace

std::optional<SolverKind> parse_solver(std::string_view name) {
  if (name == "craig") return SolverKind::Craig;
  if (name == "nscraig") return SolverKind::NsCraig;
  if (name == "scr-cg") return SolverKind::ScrCg;
  if (name == "scr-fom") return SolverKind::ScrFom;
  if (name == "pminres") return SolverKind::Pminres;
  if (name == "pgmres") return SolverKind::Pgmres;
  return std::nullopt;
}

const char* to_string(SolverKind kind) noexcept {
  switch (kind) {
    case SolverKind::Craig: return "craig";
    case SolverKind::NsCraig: return "nscraig";
    case SolverKind::ScrCg: return "scr-cg";
    case SolverKind::ScrFom: return "scr-fom";
    case SolverKind::Pminres: return "pminres";
    case SolverKind::Pgmres: return "pgmres";
  }
  return "unknown";
}

bool requires_symmetric(SolverKind kind) noexcept {
  return kind == SolverKind::Craig || kind == SolverKind::ScrCg || kind == SolverKind::Pminres;
}

RunManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    usage(std::string("manifest is not valid JSON: ") + e.what());
  }
  only_keys(j, "manifest", {"problem", "solvers", "config", "output_dir", "report_error_vs_oracle"});
  RunManifest m;
  if (!j.contains("problem")) usage("manifest needs a 'problem' object");
  m.problem = parse_problem(j.at("problem"), base_dir);
  if (!j.contains("solvers") || !j.at("solvers").is_array() || j.at("solvers").empty())
    usage("manifest needs a non-empty 'solvers' array");
  for (const auto& s : j.at("solvers")) {
    const auto kind = s.is_string() ? parse_solver(s.get<std::string>()) : std::nullopt;
    if (!kind) usage("unknown solver " + s.dump());
    m.solvers.push_back(*kind);
  }
  if (j.contains("config")) m.config = parse_config(j.at("config"));
  std::string out = m.output_dir.string();
  read(j, "output_dir", out);
  m.output_dir = base_dir / out;
  read(j, "report_error_vs_oracle", m.report_error_vs_oracle);
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) usage("cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path());
}

}  // namespace gsp::cli
