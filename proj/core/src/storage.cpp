#include "dpn/storage.hpp"

#include <algorithm>

#include "dpn/allocation.hpp"

namespace dpn {

ChargeOutcome charge(StorageUnit storage, Energy surplus) {
    Energy absorbed = std::clamp(surplus, 0.0, storage.headroom());
    storage.charge += absorbed;
    return {storage, absorbed};
}

DischargeOutcome discharge_to_queue(StorageUnit storage,
                                    const std::vector<PendingRequest>& queued_special,
                                    AllocationPolicy policy) {
    if (policy == AllocationPolicy::GeneticOptimizer) {
        policy = AllocationPolicy::SmallestFirst;
    }
    AllocationResult allocation = allocate(queued_special, storage.charge, policy);

    DischargeOutcome outcome;
    outcome.grants = allocation.grants;
    storage.charge = std::max(0.0, storage.charge - allocation.granted_total());
    outcome.unit = storage;
    return outcome;
}

SolarOutcome solar_step(const SolarConfig& solar, StorageUnit battery,
                        RngStream& rng) {
    bool producing = rng.bernoulli(solar.p_sun);
    Energy amount = rng.uniform_pos(solar.solar_cap);

    SolarOutcome outcome;
    outcome.produced = producing ? amount : 0.0;
    auto charged = charge(battery, outcome.produced);
    outcome.battery = charged.unit;
    outcome.grid_bonus = outcome.produced - charged.absorbed;
    return outcome;
}

} // namespace dpn
