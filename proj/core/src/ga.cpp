#include "dpn/ga.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "dpn/allocation.hpp"

namespace dpn {

namespace {

Chromosome mask_from_grants(const AllocationResult& allocation,
                            const std::vector<PendingRequest>& pending) {
    Chromosome mask(pending.size(), 0);
    // User ids are unique within an instance; mark the granted slots.
    for (const auto& [user, amount] : allocation.grants) {
        (void)amount;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            if (pending[i].user_id == user) {
                mask[i] = 1;
                break;
            }
        }
    }
    return mask;
}

// Geometric jump between flipped bits; equivalent to an independent
// bernoulli(p) per bit.
std::size_t mutation_skip(RngStream& rng, double log1mp) {
    double u = rng.next_double();
    if (u >= 1.0) u = std::nextafter(1.0, 0.0);
    return static_cast<std::size_t>(std::log1p(-u) / log1mp);
}

void mutate(Chromosome& mask, double rate, RngStream& rng) {
    if (rate <= 0.0 || mask.empty()) return;
    if (rate >= 1.0) {
        for (auto& bit : mask) bit ^= 1u;
        return;
    }
    double log1mp = std::log1p(-rate);
    std::size_t i = mutation_skip(rng, log1mp);
    while (i < mask.size()) {
        mask[i] ^= 1u;
        i += 1 + mutation_skip(rng, log1mp);
    }
}

} // namespace

bool chromosome_feasible(const Chromosome& mask,
                         const std::vector<PendingRequest>& pending, Energy cap) {
    Energy sum = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) sum += pending[i].amount;
    }
    return sum <= cap + kEnergyTol;
}

double fitness(const Chromosome& mask, const std::vector<PendingRequest>& pending,
               Energy cap, const GaParams& params, std::uint32_t current_round) {
    Energy sum = 0.0;
    std::size_t count = 0;
    double age_sum = 0.0;
    std::size_t aged_count = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        sum += pending[i].amount;
        ++count;
        if (pending[i].queued_since) {
            age_sum += static_cast<double>(current_round - *pending[i].queued_since);
            ++aged_count;
        }
    }
    if (sum > cap + kEnergyTol) {
        return -std::numeric_limits<double>::infinity();
    }

    double score = 0.0;
    if (cap > kEnergyTol) {
        score += params.w_energy * (sum / cap);
    }
    if (!pending.empty()) {
        score += params.w_count *
                 (static_cast<double>(count) / static_cast<double>(pending.size()));
    }
    if (params.w_queue_age != 0.0 && aged_count > 0) {
        double max_age = 0.0;
        for (const PendingRequest& request : pending) {
            if (request.queued_since) {
                max_age = std::max(
                    max_age,
                    static_cast<double>(current_round - *request.queued_since));
            }
        }
        if (max_age > 0.0) {
            score += params.w_queue_age *
                     (age_sum / static_cast<double>(aged_count)) / max_age;
        }
    }
    return score;
}

GaEvolution ga_evolve(const std::vector<PendingRequest>& pending, Energy cap,
                      const GaParams& params, RngStream& rng,
                      std::uint32_t current_round) {
    const std::size_t n = pending.size();
    const std::size_t pop_size = std::max<std::size_t>(1, params.population_size);

    auto score = [&](const Chromosome& mask) {
        return fitness(mask, pending, cap, params, current_round);
    };

    // Seed with both greedy solutions, then near-feasible random masks.
    std::vector<Chromosome> population;
    population.reserve(pop_size);
    Chromosome smallest =
        mask_from_grants(allocate(pending, cap, AllocationPolicy::SmallestFirst), pending);
    Chromosome largest =
        mask_from_grants(allocate(pending, cap, AllocationPolicy::LargestFirst), pending);
    if (pop_size == 1) {
        population.push_back(score(smallest) >= score(largest) ? smallest : largest);
    } else {
        population.push_back(std::move(smallest));
        population.push_back(std::move(largest));
    }
    Energy total = 0.0;
    for (const PendingRequest& request : pending) total += request.amount;
    double include_p = total > 0.0 ? std::min(1.0, cap / total) : 0.0;
    while (population.size() < pop_size) {
        Chromosome mask(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            mask[i] = rng.bernoulli(include_p) ? 1 : 0;
        }
        population.push_back(std::move(mask));
    }

    std::vector<double> scores(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) {
        scores[i] = score(population[i]);
    }

    GaEvolution evolution;
    auto best_it = std::max_element(scores.begin(), scores.end());
    evolution.best_fitness = *best_it;
    evolution.best_mask = population[static_cast<std::size_t>(
        std::distance(scores.begin(), best_it))];
    evolution.best_per_generation.push_back(evolution.best_fitness);

    auto tournament = [&]() -> std::size_t {
        std::size_t best = rng.bounded(static_cast<std::uint32_t>(population.size()));
        for (int k = 1; k < 3; ++k) {
            std::size_t rival =
                rng.bounded(static_cast<std::uint32_t>(population.size()));
            if (scores[rival] > scores[best]) best = rival;
        }
        return best;
    };

    std::vector<std::size_t> ranking(population.size());
    for (std::size_t gen = 0; gen < params.generations; ++gen) {
        std::iota(ranking.begin(), ranking.end(), 0);
        std::stable_sort(ranking.begin(), ranking.end(), [&](std::size_t a, std::size_t b) {
            return scores[a] > scores[b];
        });

        std::vector<Chromosome> next;
        next.reserve(pop_size);
        std::size_t elite = std::min(params.elitism, pop_size - 1);
        for (std::size_t e = 0; e < elite; ++e) {
            next.push_back(population[ranking[e]]);
        }
        while (next.size() < pop_size) {
            const Chromosome& parent_a = population[tournament()];
            const Chromosome& parent_b = population[tournament()];
            Chromosome child = parent_a;
            if (n > 1 && rng.bernoulli(params.crossover_rate)) {
                std::size_t point = 1 + rng.bounded(static_cast<std::uint32_t>(n - 1));
                std::copy(parent_b.begin() + static_cast<std::ptrdiff_t>(point),
                          parent_b.end(),
                          child.begin() + static_cast<std::ptrdiff_t>(point));
            }
            mutate(child, params.mutation_rate, rng);
            next.push_back(std::move(child));
        }
        population = std::move(next);
        for (std::size_t i = 0; i < population.size(); ++i) {
            scores[i] = score(population[i]);
        }
        auto it = std::max_element(scores.begin(), scores.end());
        if (*it > evolution.best_fitness) {
            evolution.best_fitness = *it;
            evolution.best_mask =
                population[static_cast<std::size_t>(std::distance(scores.begin(), it))];
        }
        evolution.best_per_generation.push_back(evolution.best_fitness);
    }
    return evolution;
}

AllocationResult ga_allocate(const std::vector<PendingRequest>& pending, Energy cap,
                             const GaParams& params, RngStream& rng,
                             std::uint32_t current_round) {
    AllocationResult result;
    if (pending.empty()) {
        result.surplus = std::max(0.0, cap);
        return result;
    }
    GaEvolution evolution = ga_evolve(pending, cap, params, rng, current_round);

    Energy total = 0.0;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        if (evolution.best_mask[i]) {
            result.grants.emplace_back(pending[i].user_id, pending[i].amount);
            total += pending[i].amount;
        } else {
            result.newly_queued.push_back(pending[i]);
        }
    }
    result.surplus = std::max(0.0, cap - total);
    return result;
}

GaBenchmark ga_benchmark(const std::vector<PendingRequest>& pending, Energy cap,
                         const GaParams& params, RngStream& rng,
                         std::uint32_t current_round) {
    using clock = std::chrono::steady_clock;
    GaBenchmark report;

    auto greedy_start = clock::now();
    AllocationResult smallest = allocate(pending, cap, AllocationPolicy::SmallestFirst);
    AllocationResult largest = allocate(pending, cap, AllocationPolicy::LargestFirst);
    report.greedy_seconds = std::chrono::duration<double>(clock::now() - greedy_start).count();

    double fit_small = fitness(mask_from_grants(smallest, pending), pending, cap,
                               params, current_round);
    double fit_large = fitness(mask_from_grants(largest, pending), pending, cap,
                               params, current_round);
    report.greedy_fitness = std::max(fit_small, fit_large);

    auto ga_start = clock::now();
    GaEvolution evolution = ga_evolve(pending, cap, params, rng, current_round);
    report.ga_seconds = std::chrono::duration<double>(clock::now() - ga_start).count();
    report.ga_fitness = evolution.best_fitness;
    return report;
}

} // namespace dpn
