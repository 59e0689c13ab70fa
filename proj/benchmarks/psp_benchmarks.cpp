#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "psp/engine.hpp"
#include "psp/experiment.hpp"
#include "psp/initial_bids.hpp"
#include "psp/market.hpp"
#include "psp/strategy.hpp"

namespace psp {
namespace {

Population benchmark_population(int buyers) {
  return sample_population(buyers, 42, {50.0, 100.0}, {10.0, 20.0}, 1000.0,
                           12.0);
}

BidProfile benchmark_profile(const Population& pop) {
  RngStream stream = substream(42, "initial-bids");
  return random_initial_bids(pop, stream);
}

void BM_Allocate(benchmark::State& state) {
  const Population pop = benchmark_population(static_cast<int>(state.range(0)));
  const BidProfile profile = benchmark_profile(pop);
  for (auto _ : state) {
    benchmark::DoNotOptimize(allocate(profile));
  }
}
BENCHMARK(BM_Allocate)->Arg(10)->Arg(100)->Arg(1000);

void BM_Cost(benchmark::State& state) {
  const Population pop = benchmark_population(static_cast<int>(state.range(0)));
  const BidProfile profile = benchmark_profile(pop);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cost(profile, 1));
  }
}
BENCHMARK(BM_Cost)->Arg(10)->Arg(100)->Arg(1000);

void BM_OpposingViewBuild(benchmark::State& state) {
  const Population pop = benchmark_population(static_cast<int>(state.range(0)));
  const BidProfile profile = benchmark_profile(pop);
  for (auto _ : state) {
    benchmark::DoNotOptimize(OpposingView(profile, 1));
  }
}
BENCHMARK(BM_OpposingViewBuild)->Arg(10)->Arg(100)->Arg(1000);

void BM_OpposingViewUtility(benchmark::State& state) {
  const Population pop = benchmark_population(static_cast<int>(state.range(0)));
  const BidProfile profile = benchmark_profile(pop);
  const OpposingView view(profile, 1);
  const Valuation& val = pop.valuation_of(1);
  const Bid candidate{1, val.qbar() / 2.0, val.marginal(val.qbar() / 2.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(view.utility(candidate, val));
  }
}
BENCHMARK(BM_OpposingViewUtility)->Arg(10)->Arg(100)->Arg(1000);

void BM_DefinitionalUtility(benchmark::State& state) {
  const Population pop = benchmark_population(static_cast<int>(state.range(0)));
  const BidProfile profile = benchmark_profile(pop);
  const Valuation& val = pop.valuation_of(1);
  const Bid candidate{1, val.qbar() / 2.0, val.marginal(val.qbar() / 2.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimated_utility(profile, candidate, val));
  }
}
BENCHMARK(BM_DefinitionalUtility)->Arg(10)->Arg(100);

void BM_SupFeasible(benchmark::State& state) {
  const Population pop = benchmark_population(static_cast<int>(state.range(0)));
  const BidProfile profile = benchmark_profile(pop);
  const OpposingView view(profile, 1);
  const Valuation& val = pop.valuation_of(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(view.sup_feasible(val));
  }
}
BENCHMARK(BM_SupFeasible)->Arg(10)->Arg(100)->Arg(1000);

void BM_EpsilonBestReply(benchmark::State& state) {
  const Population pop = benchmark_population(static_cast<int>(state.range(0)));
  const BidProfile profile = benchmark_profile(pop);
  const Valuation& val = pop.valuation_of(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(epsilon_best_reply(profile, 1, val, 5.0));
  }
}
BENCHMARK(BM_EpsilonBestReply)->Arg(10)->Arg(100)->Arg(1000);

void BM_AlternatingDriver(benchmark::State& state) {
  const Population pop = benchmark_population(static_cast<int>(state.range(0)));
  const BidProfile initial = benchmark_profile(pop);
  const StrategyParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_alternating_driver(pop, initial, params));
  }
}
BENCHMARK(BM_AlternatingDriver)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_VerifyEpsilonNash(benchmark::State& state) {
  const Population pop = benchmark_population(static_cast<int>(state.range(0)));
  const BidProfile initial = benchmark_profile(pop);
  const StrategyParams params;
  const DriverResult res = run_alternating_driver(pop, initial, params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_epsilon_nash(res.profile, pop, 5.0));
  }
}
BENCHMARK(BM_VerifyEpsilonNash)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_EventSimulation(benchmark::State& state) {
  const Population pop = benchmark_population(static_cast<int>(state.range(0)));
  SimConfig cfg(pop, benchmark_profile(pop));
  cfg.verify_quiescent = false;
  std::uint64_t realization = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_simulation(cfg, 42, static_cast<int>(realization++ % 1024)));
  }
}
BENCHMARK(BM_EventSimulation)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace psp

BENCHMARK_MAIN();
