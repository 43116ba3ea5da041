// Capacity-capped grant decisions and queue maintenance.
//
// Grants are all-or-nothing: a request is either satisfied in full or
// queued in full. The greedy policies walk the candidate list in sorted
// order and keep testing past a request that does not fit, so a smaller
// request later in the order can still use the remaining headroom.

#ifndef DPN_ALLOCATION_HPP
#define DPN_ALLOCATION_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "dpn/rng.hpp"
#include "dpn/types.hpp"

namespace dpn {

// Greedy allocation under the cap. SmallestFirst sorts ascending by
// amount, LargestFirst descending; ties break by queue seniority (older
// queued_since first, queued before new), then by user id. Ungranted
// requests come back in queue-seniority order. Cap comparisons use
// kEnergyTol. GeneticOptimizer is not handled here; the round
// orchestrator dispatches it to ga_allocate.
AllocationResult allocate(const std::vector<PendingRequest>& pending, Energy cap,
                          AllocationPolicy policy);

// Each entry independently survives with probability p_stay_queue;
// survivors keep their relative order. Returns the surviving queue and
// the number of dropped entries. p_stay_queue = 1 consumes no draws.
std::pair<Queue, std::size_t> queue_attrition(const Queue& queue,
                                              double p_stay_queue,
                                              RngStream& rng);

// Single candidate list: queue entries first (carrying queued_since for
// tie-breaking), then new requests. Throws std::invalid_argument on a
// duplicate user id — a queued user issues no new request.
std::vector<PendingRequest> merge_pending(
    const std::vector<PendingRequest>& new_requests, const Queue& queue);

} // namespace dpn

#endif // DPN_ALLOCATION_HPP
