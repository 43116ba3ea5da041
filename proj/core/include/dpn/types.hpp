// Domain primitives shared by every module.
//
// Energy is measured in "units": one unit is a single user's per-round
// maximum request. All energy arithmetic is double precision; every
// comparison against a cap uses the fixed absolute tolerance below.

#ifndef DPN_TYPES_HPP
#define DPN_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dpn {

using Energy = double;

inline constexpr double kEnergyTol = 1e-9;

enum class AllocationPolicy {
    SmallestFirst,
    LargestFirst,
    GeneticOptimizer,
};

std::string to_string(AllocationPolicy policy);
std::optional<AllocationPolicy> policy_from_string(const std::string& name);

struct DemandParams {
    double p_request = 0.5;
    double p_stay_on = 0.5;
    Energy max_request_per_user = 1.0;
};

struct StorageConfig {
    Energy capacity = 0.0;
    Energy initial_charge = 0.0;
};

struct SolarConfig {
    Energy solar_cap = 10.0;
    double p_sun = 0.5;
};

// Knobs for the genetic allocator. Defaults follow the artifact's
// calibration; fitness weights are what the presets override.
struct GaParams {
    std::size_t population_size = 100;
    std::size_t generations = 70;
    double mutation_rate = 0.01;
    double crossover_rate = 0.8;
    std::size_t elitism = 2;
    double w_energy = 1.0;
    double w_count = 0.0;
    double w_queue_age = 0.0;
};

struct GridConfig {
    std::size_t n_users = 500;
    Energy energy_cap = 150.0;
    double p_stay_queue = 1.0;
    double p_change_queue_status = 0.0;
    AllocationPolicy policy = AllocationPolicy::SmallestFirst;
    std::size_t n_special_users = 0;
    std::optional<StorageConfig> battery;
    std::optional<SolarConfig> solar;
    std::size_t n_rounds = 50;
    std::size_t n_simulations = 1;
    std::uint64_t seed = 1;

    double p_request = 0.5;
    double p_stay_on = 0.5;
    Energy max_request_per_user = 1.0;

    std::optional<GaParams> ga;

    DemandParams demand_params() const {
        return DemandParams{p_request, p_stay_on, max_request_per_user};
    }
};

struct UserState {
    std::uint32_t id = 0;
    bool on = false;
    Energy request = 0.0;
    bool special = false;
    // Set iff this user's request currently sits in the queue.
    std::optional<std::uint32_t> queued_since;

    bool queued() const { return queued_since.has_value(); }
};

struct PendingRequest {
    std::uint32_t user_id = 0;
    Energy amount = 0.0;
    // Absent for requests issued this round.
    std::optional<std::uint32_t> queued_since;
};

// Oldest entry first; order and amounts persist until grant or drop.
using Queue = std::vector<PendingRequest>;

struct AllocationResult {
    // Grant order preserved; each grant is the full requested amount.
    std::vector<std::pair<std::uint32_t, Energy>> grants;
    // Ungranted requests in queue-seniority order.
    std::vector<PendingRequest> newly_queued;
    Energy surplus = 0.0;

    Energy granted_total() const {
        Energy sum = 0.0;
        for (const auto& [user, amount] : grants) sum += amount;
        return sum;
    }
};

} // namespace dpn

#endif // DPN_TYPES_HPP
