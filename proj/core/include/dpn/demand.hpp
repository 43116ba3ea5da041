// Per-round stochastic request generation and the closed-form 2-state
// Markov baseline used to validate it.
//
// Each round every user draws three uniforms from the demand stream
// (turn-on test, stay-on test, fresh request amount) whether or not the
// draws end up used. The fixed draw count keeps the demand stream
// aligned across scenario variants that only differ in queue or storage
// behavior, which is what makes paired-seed comparisons meaningful.

#ifndef DPN_DEMAND_HPP
#define DPN_DEMAND_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "dpn/rng.hpp"
#include "dpn/types.hpp"

namespace dpn {

struct DemandStepOutcome {
    // Post-step request per input state, index-aligned. Positive exactly
    // for users that are ON after the step.
    std::vector<Energy> requests;
    std::uint32_t turned_on = 0;
    std::uint32_t turned_off = 0;
};

// Applies one demand round in place. Users whose request sits in the
// queue are frozen: their state is left untouched (their draws are
// discarded). Previously-OFF users turn ON with probability p_request
// and draw a request on (0, max_request]; previously-ON users turn OFF
// with probability 1 - p_stay_on, otherwise keep their exact request.
DemandStepOutcome step_demand(std::vector<UserState>& states,
                              const DemandParams& params, RngStream& rng);

// Stationary ON probability of the two-state chain with OFF->ON rate
// p_request and ON->OFF rate 1 - p_stay_on:
//   p_request / (p_request + 1 - p_stay_on)
// Throws std::domain_error when both rates are zero (no unique
// stationary distribution).
double stationary_on_probability(const DemandParams& params);

// Mean fraction of ON users over post-burn-in rounds. Throws
// std::invalid_argument when the post-burn-in window is empty.
double empirical_on_fraction(std::span<const DemandStepOutcome> trajectory,
                             std::size_t burn_in);

} // namespace dpn

#endif // DPN_DEMAND_HPP
