#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "gsp_cli/runner.hpp"

namespace {

using namespace gsp;

int generate_random(const RandomSpec& spec, const std::string& preconditioner, const std::string& out) {
  SaddleSystem sys = gen_random(spec);
  std::optional<SpdPreconditioner> n;
  if (preconditioner == "random-diagonal") n = random_diagonal_preconditioner(sys.n_size(), spec.seed + 1);
  write_bundle(out, sys, n);
  std::cout << "wrote " << out << "/system.json (m=" << sys.m_size() << ", n=" << sys.n_size()
            << ", symmetric=" << (sys.symmetric() ? "true" : "false") << ")\n";
  return cli::kExitOk;
}

int generate_stokes(const StokesSpec& spec, const std::string& out) {
  StokesProblem p = gen_stokes_channel(spec);
  write_bundle(out, p.system, p.preconditioner);
  std::cout << "wrote " << out << "/system.json (m=" << p.system.m_size() << ", n=" << p.system.n_size()
            << ", symmetric=" << (p.system.symmetric() ? "true" : "false") << ")\n";
  return cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gsp: Golub-Kahan based solvers for generalized saddle point systems"};
  app.require_subcommand(1);

  std::string manifest_path;
  auto* run = app.add_subcommand("run", "Run the solvers listed in a manifest");
  run->add_option("manifest", manifest_path, "JSON run manifest")->required();
  auto* compare = app.add_subcommand("compare", "Run at least two solvers and write a comparison table");
  compare->add_option("manifest", manifest_path, "JSON run manifest")->required();

  auto* gen = app.add_subcommand("gen", "Generate a system bundle (Matrix Market files + system.json)");
  gen->require_subcommand(1);
  std::string out_dir;

  RandomSpec rspec;
  std::string preconditioner = "identity";
  auto* gen_random_cmd = gen->add_subcommand("random", "Random instance");
  gen_random_cmd->add_option("--m", rspec.m, "Rows of A")->capture_default_str();
  gen_random_cmd->add_option("--n", rspec.n, "Columns of A")->capture_default_str();
  gen_random_cmd->add_option("--density", rspec.density, "Nonzero fraction of A")->capture_default_str();
  gen_random_cmd->add_option("--lo", rspec.lo, "Smallest eigenvalue bound of M")->capture_default_str();
  gen_random_cmd->add_option("--hi", rspec.hi, "Largest eigenvalue bound of M")->capture_default_str();
  gen_random_cmd->add_option("--skew", rspec.skew, "Skew-symmetric strength (0 = symmetric M)")->capture_default_str();
  gen_random_cmd->add_option("--c-rank", rspec.c_rank, "Rank of C")->capture_default_str();
  gen_random_cmd->add_option("--seed", rspec.seed, "Random seed")->capture_default_str();
  gen_random_cmd->add_option("--preconditioner", preconditioner, "identity or random-diagonal")
      ->check(CLI::IsMember({"identity", "random-diagonal"}))
      ->capture_default_str();
  gen_random_cmd->add_option("-o,--output", out_dir, "Output directory")->required();

  StokesSpec sspec;
  std::string wind = "none";
  auto* gen_stokes_cmd = gen->add_subcommand("stokes", "Staggered-grid Stokes/Oseen channel");
  gen_stokes_cmd->add_option("--nx", sspec.nx, "Cells along the channel")->capture_default_str();
  gen_stokes_cmd->add_option("--ny", sspec.ny, "Cells across the channel")->capture_default_str();
  gen_stokes_cmd->add_option("--length", sspec.length, "Channel length")->capture_default_str();
  gen_stokes_cmd->add_option("--viscosity", sspec.viscosity, "Kinematic viscosity")->capture_default_str();
  gen_stokes_cmd->add_option("--gamma", sspec.gamma, "Pressure stabilization")->capture_default_str();
  gen_stokes_cmd->add_option("--wind", wind, "none, poiseuille or uniform")
      ->check(CLI::IsMember({"none", "poiseuille", "uniform"}))
      ->capture_default_str();
  gen_stokes_cmd->add_option("--wind-strength", sspec.wind_strength, "Wind scaling")->capture_default_str();
  gen_stokes_cmd->add_option("-o,--output", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    if (*run) return cli::run_command(cli::load_manifest(manifest_path), std::cout);
    if (*compare) return cli::compare_command(cli::load_manifest(manifest_path), std::cout);
    if (*gen_random_cmd) return generate_random(rspec, preconditioner, out_dir);
    if (*gen_stokes_cmd) {
      sspec.wind = wind == "poiseuille" ? Wind::Poiseuille : wind == "uniform" ? Wind::Uniform : Wind::None;
      return generate_stokes(sspec, out_dir);
    }
  } catch (const Error& e) {
    std::cerr << "gsp: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "gsp: " << e.what() << "\n";
    return cli::kExitUsage;
  }
  return cli::kExitUsage;
}
