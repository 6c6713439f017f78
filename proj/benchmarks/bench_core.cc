#include <benchmark/benchmark.h>

#include "blockcg/bounds.hpp"
#include "blockcg/experiments.hpp"

using namespace blockcg;

namespace {

SolveTrace solve_ex41(int s, int max_m) {
  Scenario sc = make_scenario("ex4.1");
  SpdOperator a = spectrum_matrix(sc.spectrum);
  SolveOptions opts;
  opts.max_m = max_m;
  opts.tol = 0.0;
  opts.min_m = max_m;
  opts.checkpoints = {max_m / 2};
  Matrix b = Matrix::Ones(100, s);
  Matrix x0 = Matrix::Zero(100, s);
  if (s > 1) x0.setRandom();
  return block_cg_solve(a, b, x0, opts);
}

void BM_BlockCgSolve(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_ex41(s, 40));
  }
}
BENCHMARK(BM_BlockCgSolve)->Arg(1)->Arg(2)->Arg(4);

void BM_LanczosSteps(benchmark::State& state) {
  SpdOperator a = clustered_spectrum();
  Matrix r0 = Matrix::Ones(404, static_cast<Eigen::Index>(state.range(0)));
  for (auto _ : state) {
    LanczosState st = lanczos_init(a, r0);
    for (int i = 0; i < 30 && !st.breakdown; ++i) lanczos_step(st, a);
    benchmark::DoNotOptimize(st);
  }
}
BENCHMARK(BM_LanczosSteps)->Arg(1)->Arg(4)->Arg(8);

void BM_SubspaceBound(benchmark::State& state) {
  Scenario sc = make_scenario("ex4.1");
  SpdOperator a = spectrum_matrix(sc.spectrum);
  SpectralDecomposition eig{sc.spectrum, Matrix::Identity(100, 100)};
  SolveTrace tr = solve_ex41(1, 40);
  BoundConfig cfg;
  cfg.m = 20;
  cfg.j_max = static_cast<int>(state.range(0));
  SolveOptions opts;
  for (auto _ : state) {
    SolveOptions o;
    o.max_m = 40;
    o.tol = 0.0;
    o.min_m = 40;
    o.checkpoints = {20};
    SolveTrace t = block_cg_solve(a, Matrix::Ones(100, 1),
                                  Matrix::Zero(100, 1), o);
    benchmark::DoNotOptimize(evaluate_bounds(a, t, eig, cfg));
  }
}
BENCHMARK(BM_SubspaceBound)->Arg(5)->Arg(10);

void BM_Ic0Poisson(benchmark::State& state) {
  Matrix a = poisson2d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ic0(a));
  }
}
BENCHMARK(BM_Ic0Poisson)->Arg(10)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
