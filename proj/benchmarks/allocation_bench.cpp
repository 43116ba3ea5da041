#include <benchmark/benchmark.h>

#include "dpn/allocation.hpp"
#include "dpn/ga.hpp"
#include "dpn/rng.hpp"

namespace {

std::vector<dpn::PendingRequest> random_instance(std::size_t n, std::uint64_t seed) {
    dpn::RngStream rng(dpn::splitmix64(seed), 0);
    std::vector<dpn::PendingRequest> pending;
    pending.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        pending.push_back({static_cast<std::uint32_t>(i), rng.uniform_pos(1.0),
                           std::nullopt});
    }
    return pending;
}

void BM_AllocateSmallestFirst(benchmark::State& state) {
    auto pending = random_instance(static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) {
        auto result = dpn::allocate(pending, 100.0,
                                    dpn::AllocationPolicy::SmallestFirst);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_AllocateSmallestFirst)->Arg(100)->Arg(300)->Arg(500);

void BM_AllocateLargestFirst(benchmark::State& state) {
    auto pending = random_instance(static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) {
        auto result =
            dpn::allocate(pending, 100.0, dpn::AllocationPolicy::LargestFirst);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_AllocateLargestFirst)->Arg(100)->Arg(300)->Arg(500);

void BM_GaAllocate(benchmark::State& state) {
    auto pending = random_instance(500, 7);
    dpn::GaParams params;
    params.generations = static_cast<std::size_t>(state.range(0));
    params.w_energy = 0.4;
    params.w_count = 0.2;
    params.w_queue_age = 0.4;
    dpn::RngStream rng(42, 3);
    for (auto _ : state) {
        auto result = dpn::ga_allocate(pending, 200.0, params, rng);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_GaAllocate)->Arg(10)->Arg(70)->Unit(benchmark::kMillisecond);

} // namespace
