#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dpn/allocation.hpp"
#include "dpn/ga.hpp"
#include "dpn/rng.hpp"

using namespace dpn;

namespace {

std::vector<PendingRequest> micro_grid_snapshot() {
    return {
        {0, 0.4974, std::nullopt}, {1, 0.4869, std::nullopt},
        {3, 0.5473, std::nullopt}, {6, 0.5221, std::nullopt},
        {8, 0.9519, std::nullopt},
    };
}

std::vector<PendingRequest> random_instance(std::size_t n, RngStream& rng,
                                            double queued_fraction = 0.0,
                                            std::uint32_t current_round = 0) {
    std::vector<PendingRequest> pending;
    pending.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::optional<std::uint32_t> since;
        if (rng.next_double() < queued_fraction && current_round > 0) {
            since = rng.bounded(current_round);
        }
        pending.push_back({static_cast<std::uint32_t>(i), rng.uniform_pos(1.0), since});
    }
    return pending;
}

double greedy_best_fitness(const std::vector<PendingRequest>& pending, Energy cap,
                           const GaParams& params, std::uint32_t round = 0) {
    double best = -std::numeric_limits<double>::infinity();
    for (auto policy :
         {AllocationPolicy::SmallestFirst, AllocationPolicy::LargestFirst}) {
        auto result = allocate(pending, cap, policy);
        Chromosome mask(pending.size(), 0);
        for (const auto& [user, amount] : result.grants) {
            (void)amount;
            for (std::size_t i = 0; i < pending.size(); ++i) {
                if (pending[i].user_id == user) {
                    mask[i] = 1;
                    break;
                }
            }
        }
        best = std::max(best, fitness(mask, pending, cap, params, round));
    }
    return best;
}

// Exhaustive best fitness over all 2^n masks.
double brute_force_best(const std::vector<PendingRequest>& pending, Energy cap,
                        const GaParams& params, std::uint32_t round = 0) {
    double best = -std::numeric_limits<double>::infinity();
    const std::size_t n = pending.size();
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
        Chromosome mask(n, 0);
        for (std::size_t i = 0; i < n; ++i) mask[i] = (bits >> i) & 1u;
        best = std::max(best, fitness(mask, pending, cap, params, round));
    }
    return best;
}

} // namespace

TEST_CASE("the all-zeros mask is feasible and scores zero") {
    auto pending = micro_grid_snapshot();
    Chromosome mask(pending.size(), 0);
    GaParams params;
    CHECK(fitness(mask, pending, 3.0, params) == 0.0);
}

TEST_CASE("a mask exceeding the cap scores minus infinity") {
    auto pending = micro_grid_snapshot();
    Chromosome mask(pending.size(), 1); // 3.0056 > 3
    GaParams params;
    CHECK(fitness(mask, pending, 3.0, params) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("micro-grid largest-first mask scores 2.5187 / 3") {
    auto pending = micro_grid_snapshot();
    Chromosome mask{1, 0, 1, 1, 1}; // users 0, 3, 6, 8
    GaParams params; // w = (1, 0, 0)
    double expected = (0.4974 + 0.5473 + 0.5221 + 0.9519) / 3.0;
    CHECK(fitness(mask, pending, 3.0, params) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("queue-age weight rewards granting older entries") {
    std::vector<PendingRequest> pending{{0, 0.5, 1u}, {1, 0.5, 9u}};
    GaParams params;
    params.w_energy = 0.0;
    params.w_queue_age = 1.0;
    Chromosome old_entry{1, 0};
    Chromosome young_entry{0, 1};
    CHECK(fitness(old_entry, pending, 1.0, params, 10) >
          fitness(young_entry, pending, 1.0, params, 10));
}

TEST_CASE("when everything fits the GA grants everything") {
    auto pending = micro_grid_snapshot();
    GaParams params;
    RngStream rng(dpn::splitmix64(31), 3);
    auto result = ga_allocate(pending, 10.0, params, rng);
    CHECK(result.grants.size() == pending.size());
    CHECK(result.newly_queued.empty());
}

TEST_CASE("GA fitness dominates both greedy policies") {
    GaParams params;
    params.w_energy = 0.4;
    params.w_count = 0.2;
    params.w_queue_age = 0.4;
    params.generations = 30;
    RngStream rng(dpn::splitmix64(32), 3);
    for (int trial = 0; trial < 10; ++trial) {
        auto pending = random_instance(200, rng, 0.3, 20);
        double cap = 40.0;
        double greedy = greedy_best_fitness(pending, cap, params, 20);
        auto evolution = ga_evolve(pending, cap, params, rng, 20);
        CHECK(evolution.best_fitness >= greedy);
    }
}

TEST_CASE("best fitness per generation never decreases") {
    GaParams params;
    params.generations = 40;
    RngStream rng(dpn::splitmix64(33), 3);
    auto pending = random_instance(80, rng);
    auto evolution = ga_evolve(pending, 15.0, params, rng);
    for (std::size_t g = 1; g < evolution.best_per_generation.size(); ++g) {
        CHECK(evolution.best_per_generation[g] >=
              evolution.best_per_generation[g - 1]);
    }
}

TEST_CASE("GA output is always feasible") {
    GaParams params;
    params.generations = 20;
    RngStream rng(dpn::splitmix64(34), 3);
    for (int trial = 0; trial < 10; ++trial) {
        auto pending = random_instance(60, rng);
        double cap = 10.0;
        auto result = ga_allocate(pending, cap, params, rng);
        CHECK(result.granted_total() <= cap + kEnergyTol);
    }
}

TEST_CASE("GA never beats the exhaustive optimum and usually finds it") {
    GaParams params;
    RngStream rng(dpn::splitmix64(35), 3);
    int found = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial) {
        std::size_t n = 8 + rng.bounded(5);
        auto pending = random_instance(n, rng);
        double cap = 0.4 * static_cast<double>(n) * 0.5;
        double optimum = brute_force_best(pending, cap, params);
        auto evolution = ga_evolve(pending, cap, params, rng);
        CHECK(evolution.best_fitness <= optimum + 1e-12);
        if (std::abs(evolution.best_fitness - optimum) <= 1e-12) ++found;
    }
    CHECK(found >= trials * 3 / 4);
}

TEST_CASE("population 1, zero generations degenerates to the best greedy") {
    GaParams params;
    params.population_size = 1;
    params.generations = 0;
    params.elitism = 0;
    RngStream rng(dpn::splitmix64(36), 3);
    auto pending = micro_grid_snapshot();
    auto evolution = ga_evolve(pending, 3.0, params, rng);
    CHECK(evolution.best_fitness ==
          doctest::Approx(greedy_best_fitness(pending, 3.0, params))
              .epsilon(1e-12));
}

TEST_CASE("empty pending short-circuits") {
    GaParams params;
    RngStream rng(1, 3);
    auto result = ga_allocate({}, 4.0, params, rng);
    CHECK(result.grants.empty());
    CHECK(result.surplus == 4.0);
}

TEST_CASE("benchmark reports GA at or above greedy") {
    GaParams params;
    params.generations = 15;
    RngStream rng(dpn::splitmix64(37), 3);
    auto pending = random_instance(500, rng);
    auto report = ga_benchmark(pending, 200.0, params, rng);
    CHECK(report.ga_fitness >= report.greedy_fitness);
    CHECK(report.ga_seconds >= 0.0);
    CHECK(report.greedy_seconds >= 0.0);
}
