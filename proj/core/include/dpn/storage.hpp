// Battery and solar secondary sources.
//
// The battery serves only designated special users whose requests sit
// in the queue. Solar production charges the battery first; whatever
// exceeds battery capacity is handed back as a bonus on the grid's
// capacity for the next round.

#ifndef DPN_STORAGE_HPP
#define DPN_STORAGE_HPP

#include <utility>
#include <vector>

#include "dpn/rng.hpp"
#include "dpn/types.hpp"

namespace dpn {

struct StorageUnit {
    StorageConfig config;
    Energy charge = 0.0;

    Energy headroom() const { return config.capacity - charge; }
};

struct ChargeOutcome {
    StorageUnit unit;
    Energy absorbed = 0.0;
};

// Absorbs min(surplus, capacity - charge).
ChargeOutcome charge(StorageUnit storage, Energy surplus);

struct DischargeOutcome {
    StorageUnit unit;
    std::vector<std::pair<std::uint32_t, Energy>> grants;

    Energy discharged_total() const {
        Energy sum = 0.0;
        for (const auto& [user, amount] : grants) sum += amount;
        return sum;
    }
};

// Allocates the current charge to queued special users under the given
// greedy policy (the genetic policy falls back to SmallestFirst here).
// Granted users leave the main queue; the rest stay queued — there is
// no guarantee the storage holds energy next round either.
DischargeOutcome discharge_to_queue(StorageUnit storage,
                                    const std::vector<PendingRequest>& queued_special,
                                    AllocationPolicy policy);

struct SolarOutcome {
    Energy produced = 0.0;
    StorageUnit battery;
    // Production beyond battery capacity; added to the next round's
    // effective grid cap.
    Energy grid_bonus = 0.0;
};

// With probability p_sun produces uniform(0, solar_cap], else nothing.
// Always consumes exactly two draws from the solar stream.
SolarOutcome solar_step(const SolarConfig& solar, StorageUnit battery,
                        RngStream& rng);

} // namespace dpn

#endif // DPN_STORAGE_HPP
