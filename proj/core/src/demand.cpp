#include "dpn/demand.hpp"

#include <stdexcept>

namespace dpn {

DemandStepOutcome step_demand(std::vector<UserState>& states,
                              const DemandParams& params, RngStream& rng) {
    DemandStepOutcome outcome;
    outcome.requests.resize(states.size(), 0.0);

    for (std::size_t i = 0; i < states.size(); ++i) {
        UserState& user = states[i];
        double p_req = rng.next_double();
        double p_on = rng.next_double();
        double fresh = rng.uniform_pos(params.max_request_per_user);

        if (user.queued()) {
            // Frozen: the queue memorizes size and order until the
            // request is satisfied or dropped.
            outcome.requests[i] = user.request;
            continue;
        }

        if (!user.on) {
            if (p_req < params.p_request) {
                user.on = true;
                user.request = fresh;
                ++outcome.turned_on;
            }
        } else {
            if (p_on > params.p_stay_on) {
                user.on = false;
                user.request = 0.0;
                ++outcome.turned_off;
            }
            // else: remains ON with the previous energy request.
        }
        outcome.requests[i] = user.request;
    }
    return outcome;
}

double stationary_on_probability(const DemandParams& params) {
    double rate_on = params.p_request;
    double rate_off = 1.0 - params.p_stay_on;
    if (rate_on + rate_off <= 0.0) {
        throw std::domain_error("no unique stationary distribution");
    }
    return rate_on / (rate_on + rate_off);
}

double empirical_on_fraction(std::span<const DemandStepOutcome> trajectory,
                             std::size_t burn_in) {
    if (trajectory.size() <= burn_in) {
        throw std::invalid_argument("empirical_on_fraction: empty window");
    }
    double sum = 0.0;
    std::size_t rounds = 0;
    for (std::size_t t = burn_in; t < trajectory.size(); ++t) {
        const auto& requests = trajectory[t].requests;
        if (requests.empty()) continue;
        std::size_t on = 0;
        for (Energy r : requests) {
            if (r > 0.0) ++on;
        }
        sum += static_cast<double>(on) / static_cast<double>(requests.size());
        ++rounds;
    }
    if (rounds == 0) {
        throw std::invalid_argument("empirical_on_fraction: empty window");
    }
    return sum / static_cast<double>(rounds);
}

} // namespace dpn
