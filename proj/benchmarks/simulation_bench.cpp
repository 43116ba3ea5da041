#include <benchmark/benchmark.h>

#include "dpn/simulation.hpp"

namespace {

void BM_RoundStep(benchmark::State& state) {
    dpn::GridConfig config;
    config.n_users = static_cast<std::size_t>(state.range(0));
    config.energy_cap = static_cast<double>(state.range(0)) / 5.0;
    config.p_stay_queue = 1.0;
    config.n_special_users = config.n_users / 10;
    config.battery = dpn::StorageConfig{10.0, 10.0};

    dpn::World world(config, 0);
    for (auto _ : state) {
        auto metrics = dpn::round_step(world, config);
        benchmark::DoNotOptimize(metrics);
    }
}
BENCHMARK(BM_RoundStep)->Arg(100)->Arg(500)->Arg(2000);

void BM_Table2Run(benchmark::State& state) {
    dpn::GridConfig config;
    config.n_users = 500;
    config.energy_cap = 100.0;
    config.p_stay_queue = 1.0;
    config.n_special_users = 50;
    config.n_rounds = 50;
    for (auto _ : state) {
        auto run = dpn::run_simulation(config, 0);
        benchmark::DoNotOptimize(run);
    }
}
BENCHMARK(BM_Table2Run)->Unit(benchmark::kMillisecond);

} // namespace
