#include "dpn/allocation.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace dpn {

namespace {

// Seniority key: queued entries sort before new ones, older first.
std::uint64_t seniority_key(const PendingRequest& request) {
    return request.queued_since ? *request.queued_since
                                : std::numeric_limits<std::uint64_t>::max();
}

} // namespace

AllocationResult allocate(const std::vector<PendingRequest>& pending, Energy cap,
                          AllocationPolicy policy) {
    std::vector<std::size_t> order(pending.size());
    std::iota(order.begin(), order.end(), 0);

    const bool ascending = policy != AllocationPolicy::LargestFirst;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const PendingRequest& ra = pending[a];
        const PendingRequest& rb = pending[b];
        if (ra.amount != rb.amount) {
            return ascending ? ra.amount < rb.amount : ra.amount > rb.amount;
        }
        std::uint64_t sa = seniority_key(ra);
        std::uint64_t sb = seniority_key(rb);
        if (sa != sb) return sa < sb;
        return ra.user_id < rb.user_id;
    });

    AllocationResult result;
    std::vector<bool> granted(pending.size(), false);
    Energy total = 0.0;
    for (std::size_t idx : order) {
        const PendingRequest& request = pending[idx];
        if (total + request.amount <= cap + kEnergyTol) {
            total += request.amount;
            granted[idx] = true;
            result.grants.emplace_back(request.user_id, request.amount);
        }
    }

    // merge_pending emits candidates in seniority order already, so a
    // stable pass over the input keeps the queue FIFO.
    for (std::size_t i = 0; i < pending.size(); ++i) {
        if (!granted[i]) result.newly_queued.push_back(pending[i]);
    }
    result.surplus = std::max(0.0, cap - total);
    return result;
}

std::pair<Queue, std::size_t> queue_attrition(const Queue& queue,
                                              double p_stay_queue,
                                              RngStream& rng) {
    if (p_stay_queue >= 1.0) {
        return {queue, 0};
    }
    Queue survivors;
    survivors.reserve(queue.size());
    std::size_t dropped = 0;
    for (const PendingRequest& entry : queue) {
        if (rng.bernoulli(p_stay_queue)) {
            survivors.push_back(entry);
        } else {
            ++dropped;
        }
    }
    return {std::move(survivors), dropped};
}

std::vector<PendingRequest> merge_pending(
    const std::vector<PendingRequest>& new_requests, const Queue& queue) {
    std::vector<PendingRequest> merged;
    merged.reserve(queue.size() + new_requests.size());
    std::unordered_set<std::uint32_t> seen;
    seen.reserve(queue.size() + new_requests.size());

    for (const PendingRequest& entry : queue) {
        if (!seen.insert(entry.user_id).second) {
            throw std::invalid_argument("merge_pending: duplicate user id " +
                                        std::to_string(entry.user_id));
        }
        merged.push_back(entry);
    }
    for (const PendingRequest& request : new_requests) {
        if (!seen.insert(request.user_id).second) {
            throw std::invalid_argument("merge_pending: duplicate user id " +
                                        std::to_string(request.user_id));
        }
        merged.push_back(request);
    }
    return merged;
}

} // namespace dpn
