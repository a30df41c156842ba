// Solver and kernel timings on the Stokes channel and random instances.

#include <benchmark/benchmark.h>

#include "gsp/baselines.hpp"
#include "gsp/craig.hpp"
#include "gsp/nscraig.hpp"
#include "gsp/problems.hpp"

namespace {

using namespace gsp;

StokesProblem stokes(Index cells, Wind wind) {
  StokesSpec spec;
  spec.nx = cells;
  spec.ny = cells;
  if (wind != Wind::None) {
    spec.wind = wind;
    spec.viscosity = 0.1;
  }
  return gen_stokes_channel(spec);
}

template <auto Solve>
void BM_StokesSolve(benchmark::State& state) {
  const auto prob = stokes(state.range(0), Wind::None);
  Index iterations = 0;
  for (auto _ : state) {
    const SolveResult r = Solve(prob.system, prob.preconditioner, SolverConfig{});
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.p.data());
  }
  state.counters["iterations"] = static_cast<double>(iterations);
}

template <auto Solve>
void BM_OseenSolve(benchmark::State& state) {
  const auto prob = stokes(state.range(0), Wind::Poiseuille);
  Index iterations = 0;
  for (auto _ : state) {
    const SolveResult r = Solve(prob.system, prob.preconditioner, SolverConfig{});
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.p.data());
  }
  state.counters["iterations"] = static_cast<double>(iterations);
}

SolveResult run_craig(const SaddleSystem& s, const SpdPreconditioner& n, const SolverConfig& c) {
  return craig_solve(s, n, c);
}
SolveResult run_scr_cg(const SaddleSystem& s, const SpdPreconditioner& n, const SolverConfig& c) {
  return scr_cg_solve(s, n, c);
}
SolveResult run_pminres(const SaddleSystem& s, const SpdPreconditioner& n, const SolverConfig& c) {
  return pminres_solve(s, n, c);
}
SolveResult run_nscraig(const SaddleSystem& s, const SpdPreconditioner& n, const SolverConfig& c) {
  return nscraig_solve(s, n, c);
}
SolveResult run_scr_fom(const SaddleSystem& s, const SpdPreconditioner& n, const SolverConfig& c) {
  return scr_fom_solve(s, n, c);
}
SolveResult run_pgmres(const SaddleSystem& s, const SpdPreconditioner& n, const SolverConfig& c) {
  return pgmres_solve(s, n, c);
}

BENCHMARK(BM_StokesSolve<run_craig>)->Name("stokes/craig")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StokesSolve<run_scr_cg>)->Name("stokes/scr-cg")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StokesSolve<run_pminres>)->Name("stokes/pminres")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OseenSolve<run_nscraig>)->Name("oseen/nscraig")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OseenSolve<run_scr_fom>)->Name("oseen/scr-fom")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OseenSolve<run_pgmres>)->Name("oseen/pgmres")->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SparseMatvec(benchmark::State& state) {
  RandomSpec spec;
  spec.m = state.range(0);
  spec.n = spec.m / 2;
  spec.density = 0.05;
  const SaddleSystem sys = gen_random(spec);
  const Vector x = Vector::Ones(spec.n);
  for (auto _ : state) {
    Vector y = sparse_matvec(sys.a(), x);
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["nnz"] = static_cast<double>(sys.a().nonzeros());
}
BENCHMARK(BM_SparseMatvec)->Name("kernel/sparse-matvec")->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
