// Genetic allocator: evolves grant subsets under the cap.
//
// The initial population is seeded with both greedy policy masks and the
// best chromosome is carried across generations, so the result is never
// worse (by fitness) than either greedy allocation on the same instance.

#ifndef DPN_GA_HPP
#define DPN_GA_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dpn/rng.hpp"
#include "dpn/types.hpp"

namespace dpn {

// Grant mask over the pending-request list; bit i grants pending[i].
using Chromosome = std::vector<std::uint8_t>;

bool chromosome_feasible(const Chromosome& mask,
                         const std::vector<PendingRequest>& pending, Energy cap);

// Infeasible masks score -infinity. Feasible masks score
//   w_energy * granted_sum / cap
// + w_count  * granted_count / pending_count
// + w_queue_age * normalized mean age of the granted queued entries,
// where ages are current_round - queued_since, normalized by the oldest
// queued entry in the instance.
double fitness(const Chromosome& mask, const std::vector<PendingRequest>& pending,
               Energy cap, const GaParams& params, std::uint32_t current_round = 0);

struct GaEvolution {
    Chromosome best_mask;
    double best_fitness = 0.0;
    // Best fitness seen up to each generation (index 0 = initial
    // population); non-decreasing when elitism >= 1.
    std::vector<double> best_per_generation;
};

GaEvolution ga_evolve(const std::vector<PendingRequest>& pending, Energy cap,
                      const GaParams& params, RngStream& rng,
                      std::uint32_t current_round = 0);

// Tournament selection, single-point crossover, per-bit mutation,
// elitism. Grants follow the best feasible chromosome; everything else
// queues in seniority order.
AllocationResult ga_allocate(const std::vector<PendingRequest>& pending, Energy cap,
                             const GaParams& params, RngStream& rng,
                             std::uint32_t current_round = 0);

struct GaBenchmark {
    double greedy_seconds = 0.0;
    double ga_seconds = 0.0;
    double greedy_fitness = 0.0; // better of the two greedy policies
    double ga_fitness = 0.0;
};

// Wall-clock and fitness comparison on one allocation instance.
GaBenchmark ga_benchmark(const std::vector<PendingRequest>& pending, Energy cap,
                         const GaParams& params, RngStream& rng,
                         std::uint32_t current_round = 0);

} // namespace dpn

#endif // DPN_GA_HPP
