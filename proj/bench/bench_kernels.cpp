// Serial reference vs OpenMP kernels. Worker count follows CONTAGION_THREADS
// (or OMP_NUM_THREADS); results are bit-identical, only wall time differs.

#include <benchmark/benchmark.h>

#include <vector>

#include "contagion/clt.hpp"
#include "contagion/ctmc.hpp"
#include "contagion/limit.hpp"
#include "contagion/parallel.hpp"

namespace {

using namespace contagion;

const Environment& scenario() {
  static const auto env =
      validate_environment({{4, 4, 3, 1, 0.4}, {0.1, 0.1, 3, 1, 0.6}});
  return env;
}

template <bool Parallel>
void ensemble(benchmark::State& state) {
  const auto portfolio = build_portfolio(scenario(), static_cast<std::size_t>(state.range(0)),
                                         AssignmentMode::DeterministicProportions, 0);
  const auto grid = uniform_grid(5.0, 512);
  const std::vector<double> thresholds{0.15};
  for (auto _ : state) {
    auto stats = Parallel ? monte_carlo(portfolio, 5.0, grid, 2000, thresholds, 1)
                          : monte_carlo_serial(portfolio, 5.0, grid, 2000, thresholds, 1);
    benchmark::DoNotOptimize(stats.var_scaled_loss.data());
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}

template <bool Parallel>
void covdiag(benchmark::State& state) {
  const auto& env = scenario();
  const auto sol = solve_limit(env, 5.0, kDefaultGridSize, kDefaultOdeTolerance);
  const auto cert = check_reciprocity(env, 1e-12);
  const auto replicas = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto est = Parallel ? mc_validate_covdiag(sol, env, cert, 2.5, replicas, 1)
                        : mc_validate_covdiag_serial(sol, env, cert, 2.5, replicas, 1);
    benchmark::DoNotOptimize(est.estimate);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(ensemble<false>)->Name("monte_carlo/serial")->Arg(125)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(ensemble<true>)->Name("monte_carlo/parallel")->Arg(125)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(covdiag<false>)->Name("covdiag/serial")->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(covdiag<true>)->Name("covdiag/parallel")->Arg(100000)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  if (auto workers = worker_count_from_env()) set_worker_count(*workers);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
