#include "dpn/simulation.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "dpn/allocation.hpp"
#include "dpn/config.hpp"
#include "dpn/demand.hpp"
#include "dpn/ga.hpp"

namespace dpn {

EpisodeTracker::EpisodeTracker(std::size_t n_users) : users_(n_users) {}

void EpisodeTracker::on_enqueued(std::uint32_t user, std::uint32_t round) {
    UserTrack& track = users_[user];
    track.enqueue_round = round;
    track.rounds_waited = 0;
    track.in_queue = true;
    track.ever_queued = true;
}

void EpisodeTracker::on_round_waited(std::uint32_t user) {
    ++users_[user].rounds_waited;
}

void EpisodeTracker::on_satisfied(std::uint32_t user, std::uint32_t round,
                                  bool from_battery) {
    UserTrack& track = users_[user];
    if (!track.in_queue) return;
    track.in_queue = false;
    track.ever_satisfied = true;
    ++episodes_;
    episode_rounds_ += track.rounds_waited;
    ++satisfied_episodes_;
    satisfaction_rounds_ += (round - track.enqueue_round) + 1;
    if (from_battery) {
        track.ever_received_battery = true;
        ++battery_episodes_;
        battery_wait_rounds_ += round - track.enqueue_round;
    }
}

void EpisodeTracker::on_dropped(std::uint32_t user) {
    UserTrack& track = users_[user];
    if (!track.in_queue) return;
    track.in_queue = false;
    ++episodes_;
    episode_rounds_ += track.rounds_waited;
}

void EpisodeTracker::on_requested_battery(std::uint32_t user) {
    users_[user].ever_requested_battery = true;
}

RunWaitStats EpisodeTracker::finish(std::size_t queue_size_at_end) const {
    std::uint64_t episodes = episodes_;
    std::uint64_t episode_rounds = episode_rounds_;
    double never_satisfied = 0.0;
    double never_battery = 0.0;
    for (const UserTrack& track : users_) {
        if (track.in_queue) {
            ++episodes;
            episode_rounds += track.rounds_waited;
        }
        if (track.ever_queued && !track.ever_satisfied) never_satisfied += 1.0;
        if (track.ever_requested_battery && !track.ever_received_battery) {
            never_battery += 1.0;
        }
    }

    RunWaitStats stats;
    stats.episodes = episodes;
    stats.satisfied_episodes = satisfied_episodes_;
    stats.battery_episodes = battery_episodes_;
    stats.rounds_in_queue =
        episodes ? static_cast<double>(episode_rounds) / static_cast<double>(episodes)
                 : 0.0;
    stats.rounds_to_satisfaction =
        satisfied_episodes_ ? static_cast<double>(satisfaction_rounds_) /
                                  static_cast<double>(satisfied_episodes_)
                            : 0.0;
    stats.battery_wait =
        battery_episodes_ ? static_cast<double>(battery_wait_rounds_) /
                                static_cast<double>(battery_episodes_)
                          : 0.0;
    stats.never_satisfied_in_queue = never_satisfied;
    stats.unsatisfied_at_end = static_cast<double>(queue_size_at_end);
    stats.never_satisfied_by_battery = never_battery;
    return stats;
}

World::World(const GridConfig& config, std::uint64_t replica)
    : rng(RngBundle::make(config.seed, replica)), episodes(config.n_users) {
    users.resize(config.n_users);
    for (std::size_t i = 0; i < config.n_users; ++i) {
        users[i].id = static_cast<std::uint32_t>(i);
        users[i].special = i < config.n_special_users;
    }
    if (config.battery) {
        battery = StorageUnit{*config.battery, config.battery->initial_charge};
    }
}

RoundMetrics round_step(World& world, const GridConfig& config,
                        const std::vector<Energy>* injected_requests) {
    const std::uint32_t round = world.round;
    RoundMetrics metrics;
    const Energy effective_cap = config.energy_cap + world.pending_grid_bonus;
    world.pending_grid_bonus = 0.0;
    metrics.effective_cap = effective_cap;

    // 1. Queue attrition; a dropped request turns its user OFF.
    auto [surviving, dropped] =
        queue_attrition(world.queue, config.p_stay_queue, world.rng.queue);
    if (dropped > 0) {
        std::unordered_set<std::uint32_t> alive;
        alive.reserve(surviving.size());
        for (const PendingRequest& entry : surviving) alive.insert(entry.user_id);
        for (const PendingRequest& entry : world.queue) {
            if (!alive.contains(entry.user_id)) {
                UserState& user = world.users[entry.user_id];
                user.on = false;
                user.request = 0.0;
                user.queued_since.reset();
                world.episodes.on_dropped(entry.user_id);
            }
        }
    }
    world.queue = std::move(surviving);
    metrics.customers_dropped = static_cast<double>(dropped);

    // Optional queued-amount redraw.
    if (config.p_change_queue_status > 0.0) {
        for (PendingRequest& entry : world.queue) {
            if (world.rng.queue.bernoulli(config.p_change_queue_status)) {
                entry.amount = world.rng.queue.uniform_pos(config.max_request_per_user);
                world.users[entry.user_id].request = entry.amount;
            }
        }
    }

    // 2. Demand step (queued users frozen).
    if (injected_requests && round == 0) {
        if (injected_requests->size() != world.users.size()) {
            throw std::invalid_argument("injected requests: need one amount per user");
        }
        for (std::size_t i = 0; i < world.users.size(); ++i) {
            world.users[i].request = (*injected_requests)[i];
            world.users[i].on = (*injected_requests)[i] > 0.0;
        }
    } else {
        step_demand(world.users, config.demand_params(), world.rng.demand);
    }

    // 3. Merge queued and fresh requests into one candidate pool.
    std::vector<PendingRequest> fresh;
    for (const UserState& user : world.users) {
        if (!user.queued() && user.on && user.request > 0.0) {
            fresh.push_back(PendingRequest{user.id, user.request, std::nullopt});
        }
    }
    std::vector<PendingRequest> pool = merge_pending(fresh, world.queue);
    metrics.customers_requested = static_cast<double>(pool.size());
    for (const PendingRequest& request : pool) {
        metrics.energy_requested += request.amount;
    }

    // 4. Allocate under the effective cap.
    AllocationResult allocation;
    if (config.policy == AllocationPolicy::GeneticOptimizer) {
        GaParams ga = config.ga ? *config.ga : GaParams{};
        allocation = ga_allocate(pool, effective_cap, ga, world.rng.ga, round);
    } else {
        allocation = allocate(pool, effective_cap, config.policy);
    }

    metrics.energy_distributed = allocation.granted_total();
    metrics.customers_received = static_cast<double>(allocation.grants.size());

    std::unordered_set<std::uint32_t> was_queued;
    was_queued.reserve(world.queue.size());
    for (const PendingRequest& entry : world.queue) was_queued.insert(entry.user_id);

    for (const auto& [user_id, amount] : allocation.grants) {
        (void)amount;
        UserState& user = world.users[user_id];
        if (user.queued()) {
            metrics.customers_satisfied_from_queue += 1.0;
            world.episodes.on_satisfied(user_id, round, /*from_battery=*/false);
            user.queued_since.reset();
        }
    }
    for (const PendingRequest& entry : allocation.newly_queued) {
        UserState& user = world.users[entry.user_id];
        if (!was_queued.contains(entry.user_id)) {
            metrics.customers_entered_queue += 1.0;
            user.queued_since = round;
            world.episodes.on_enqueued(entry.user_id, round);
        }
    }
    world.queue = allocation.newly_queued;
    Energy surplus = allocation.surplus;

    // 5. Battery and solar serve the queue and absorb leftovers.
    if (world.battery) {
        std::vector<PendingRequest> queued_special;
        for (const PendingRequest& entry : world.queue) {
            if (world.users[entry.user_id].special) {
                queued_special.push_back(entry);
                world.episodes.on_requested_battery(entry.user_id);
            }
        }
        metrics.customers_requested_battery =
            static_cast<double>(queued_special.size());
        for (const PendingRequest& entry : queued_special) {
            metrics.battery_requested += entry.amount;
        }

        DischargeOutcome discharge =
            discharge_to_queue(*world.battery, queued_special, config.policy);
        *world.battery = discharge.unit;
        if (!discharge.grants.empty()) {
            std::unordered_set<std::uint32_t> battery_users;
            battery_users.reserve(discharge.grants.size());
            for (const auto& [user_id, amount] : discharge.grants) {
                (void)amount;
                battery_users.insert(user_id);
                UserState& user = world.users[user_id];
                user.queued_since.reset();
                metrics.customers_satisfied_from_queue += 1.0;
                world.episodes.on_satisfied(user_id, round, /*from_battery=*/true);
            }
            std::erase_if(world.queue, [&](const PendingRequest& entry) {
                return battery_users.contains(entry.user_id);
            });
            metrics.battery_distributed = discharge.discharged_total();
            metrics.customers_received_battery =
                static_cast<double>(discharge.grants.size());
            metrics.customers_received += metrics.customers_received_battery;
        }

        ChargeOutcome charged = charge(*world.battery, surplus);
        *world.battery = charged.unit;

        if (config.solar) {
            SolarOutcome solar = solar_step(*config.solar, *world.battery,
                                            world.rng.solar);
            *world.battery = solar.battery;
            metrics.solar_produced = solar.produced;
            metrics.grid_bonus = solar.grid_bonus;
            world.pending_grid_bonus = solar.grid_bonus;
        }
        metrics.battery_available = world.battery->charge;
    }

    // 6. End-of-round accounting.
    for (const PendingRequest& entry : world.queue) {
        world.episodes.on_round_waited(entry.user_id);
    }
    metrics.customers_in_queue = static_cast<double>(world.queue.size());
    metrics.total_delivered =
        metrics.energy_distributed + metrics.battery_distributed;

    ++world.round;
    return metrics;
}

std::uint64_t config_digest(const GridConfig& config) {
    std::string text = config_to_json(config);
    std::uint64_t digest = 1469598103934665603ULL;
    for (unsigned char c : text) {
        digest ^= c;
        digest *= 1099511628211ULL;
    }
    return digest;
}

RunResult run_simulation(const GridConfig& config, std::uint64_t replica,
                         const std::vector<Energy>* injected_requests) {
    World world(config, replica);
    RunResult result;
    result.rounds.reserve(config.n_rounds);
    for (std::size_t r = 0; r < config.n_rounds; ++r) {
        result.rounds.push_back(round_step(world, config, injected_requests));
    }
    result.waits = world.episodes.finish(world.queue.size());
    result.config_digest = config_digest(config);
    return result;
}

} // namespace dpn
