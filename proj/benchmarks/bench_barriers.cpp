#include <benchmark/benchmark.h>

#include <random>

#include "qcone/certify.hpp"
#include "qcone/ipm.hpp"
#include "qcone/problems.hpp"

namespace {

using namespace qcone;

const char* const kKinds[] = {"epi_qre", "hypo_qalpha:0.5", "epi_dbs", "epi_qhat:2",
                              "trace_persp_hypo:log"};

void BM_BarrierGradient(benchmark::State& state) {
  const ConeSpec c = make_cone(kKinds[state.range(0)], static_cast<int>(state.range(1)));
  std::mt19937_64 rng(1);
  const ConePoint p = sample_interior(c, rng);
  for (auto _ : state) {
    BarrierOracle o(c, p);
    benchmark::DoNotOptimize(o.grad());
  }
  state.SetLabel(c.to_string());
}
BENCHMARK(BM_BarrierGradient)->ArgsProduct({{0, 1, 2, 3, 4}, {2, 4, 8}});

void BM_BarrierHessian(benchmark::State& state) {
  const ConeSpec c = make_cone(kKinds[state.range(0)], static_cast<int>(state.range(1)));
  std::mt19937_64 rng(2);
  const ConePoint p = sample_interior(c, rng);
  for (auto _ : state) {
    BarrierOracle o(c, p);
    benchmark::DoNotOptimize(o.hessian());
  }
  state.SetLabel(c.to_string());
}
BENCHMARK(BM_BarrierHessian)->ArgsProduct({{0, 1, 2, 3, 4}, {2, 4}});

void BM_MeasureBuild(benchmark::State& state) {
  const OpConcaveFn g = catalog("pow:0.5");
  for (auto _ : state) benchmark::DoNotOptimize(build_measure(g, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_MeasureBuild)->Arg(60)->Arg(120)->Arg(240);

void BM_SolvePinching(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  CMat x0 = sample_pd(n, rng);
  x0 /= x0.trace().real();
  const ProblemSpec p = pinching_problem(x0);
  SolverOptions opt;
  opt.eps = 1e-8;
  opt.mode = state.range(1) ? SolveMode::ShortStep : SolveMode::LongStep;
  int iters = 0;
  for (auto _ : state) {
    const SolveResult r = solve(p, opt);
    iters = r.outer_iterations;
    benchmark::DoNotOptimize(r.objective);
  }
  state.counters["outer_iters"] = iters;
}
BENCHMARK(BM_SolvePinching)
    ->ArgsProduct({{2, 3, 4, 5}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
