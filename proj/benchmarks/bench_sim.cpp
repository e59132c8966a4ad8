#include <benchmark/benchmark.h>

#include "ammlab/agents.hpp"
#include "ammlab/amm.hpp"
#include "ammlab/sim.hpp"

namespace {

using namespace ammlab;

void BM_BuyConstantProduct(benchmark::State& state) {
    MarketState market{1000.0, 1000.0, 0.5};
    for (auto _ : state) {
        MarketState m = market;
        benchmark::DoNotOptimize(buy(m, {Side::Yes, 100.0}));
    }
}
BENCHMARK(BM_BuyConstantProduct);

void BM_BuyManiswap(benchmark::State& state) {
    MarketState market{1000.0, 1000.0, 0.3};
    for (auto _ : state) {
        MarketState m = market;
        benchmark::DoNotOptimize(buy(m, {Side::Yes, 100.0}));
    }
}
BENCHMARK(BM_BuyManiswap);

void BM_OptimalOrder(benchmark::State& state) {
    const MarketState market{1000.0, 1000.0, 0.5};
    for (auto _ : state)
        benchmark::DoNotOptimize(optimal_order(0.7, 100.0, market));
}
BENCHMARK(BM_OptimalOrder);

void BM_OptimalOrderManiswap(benchmark::State& state) {
    const MarketState market{1000.0, 1000.0, 0.3};
    for (auto _ : state)
        benchmark::DoNotOptimize(optimal_order(0.7, 100.0, market));
}
BENCHMARK(BM_OptimalOrderManiswap);

void BM_RunReplication(benchmark::State& state) {
    SimConfig config;
    config.replications = 1;
    std::uint64_t rep = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_replication(config, rep++));
}
BENCHMARK(BM_RunReplication);

void BM_MonteCarlo(benchmark::State& state) {
    SimConfig config;
    config.replications = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(run_monte_carlo(config));
}
BENCHMARK(BM_MonteCarlo)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
