#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "dpn/metrics.hpp"
#include "dpn/simulation.hpp"

using namespace dpn;

namespace {

GridConfig busy_config() {
    GridConfig config;
    config.n_users = 200;
    config.energy_cap = 40.0;
    config.p_request = 0.5;
    config.p_stay_on = 0.5;
    config.p_stay_queue = 0.9;
    config.n_special_users = 20;
    config.battery = StorageConfig{4.0, 4.0};
    config.solar = SolarConfig{4.0, 0.5};
    config.n_rounds = 80;
    config.seed = 11;
    return config;
}

} // namespace

TEST_CASE("identical config and seed give identical trajectories") {
    GridConfig config = busy_config();
    RunResult a = run_simulation(config, 0);
    RunResult b = run_simulation(config, 0);
    REQUIRE(a.rounds.size() == b.rounds.size());
    for (std::size_t r = 0; r < a.rounds.size(); ++r) {
        for (const MetricField& field : round_metric_fields()) {
            CHECK(a.rounds[r].*(field.member) == b.rounds[r].*(field.member));
        }
    }
    CHECK(a.waits.rounds_in_queue == b.waits.rounds_in_queue);
}

TEST_CASE("different replicas diverge") {
    GridConfig config = busy_config();
    RunResult a = run_simulation(config, 0);
    RunResult b = run_simulation(config, 1);
    bool any_difference = false;
    for (std::size_t r = 0; r < a.rounds.size() && !any_difference; ++r) {
        any_difference = a.rounds[r].energy_distributed !=
                         b.rounds[r].energy_distributed;
    }
    CHECK(any_difference);
}

TEST_CASE("an ample cap never queues anyone") {
    GridConfig config;
    config.n_users = 100;
    config.energy_cap = 100.0; // n_users * max_request
    config.p_request = 0.9;
    config.p_stay_on = 0.9;
    config.n_rounds = 60;
    RunResult run = run_simulation(config, 0);
    for (const RoundMetrics& metrics : run.rounds) {
        CHECK(metrics.customers_in_queue == 0.0);
        CHECK(metrics.customers_entered_queue == 0.0);
    }
}

TEST_CASE("a zero cap queues every request and grants nothing") {
    GridConfig config;
    config.n_users = 50;
    config.energy_cap = 0.0;
    config.p_request = 1.0;
    config.p_stay_on = 1.0;
    config.p_stay_queue = 1.0;
    config.n_rounds = 5;
    RunResult run = run_simulation(config, 0);
    for (const RoundMetrics& metrics : run.rounds) {
        CHECK(metrics.energy_distributed == 0.0);
        CHECK(metrics.customers_received == 0.0);
    }
    CHECK(run.rounds.back().customers_in_queue == 50.0);
}

TEST_CASE("per-round accounting: requested = received + in queue") {
    GridConfig config = busy_config();
    RunResult run = run_simulation(config, 0);
    for (const RoundMetrics& metrics : run.rounds) {
        CHECK(metrics.customers_requested ==
              metrics.customers_received + metrics.customers_in_queue);
    }
}

TEST_CASE("queue balance: size evolves by entries minus exits") {
    GridConfig config = busy_config();
    World world(config, 0);
    double previous_size = 0.0;
    for (std::size_t r = 0; r < config.n_rounds; ++r) {
        RoundMetrics metrics = round_step(world, config);
        CHECK(metrics.customers_in_queue ==
              previous_size - metrics.customers_dropped +
                  metrics.customers_entered_queue -
                  metrics.customers_satisfied_from_queue);
        previous_size = metrics.customers_in_queue;
    }
}

TEST_CASE("grid never exceeds the effective cap and conserves energy") {
    GridConfig config = busy_config();
    RunResult run = run_simulation(config, 0);
    for (const RoundMetrics& metrics : run.rounds) {
        CHECK(metrics.energy_distributed <= metrics.effective_cap + kEnergyTol);
        CHECK(metrics.total_delivered ==
              doctest::Approx(metrics.energy_distributed +
                              metrics.battery_distributed)
                  .epsilon(1e-12));
    }
}

TEST_CASE("battery balance reconstructs exactly from the metrics") {
    GridConfig config = busy_config();
    RunResult run = run_simulation(config, 0);
    double previous_charge = config.battery->initial_charge;
    for (const RoundMetrics& metrics : run.rounds) {
        double after_discharge = previous_charge - metrics.battery_distributed;
        double surplus = metrics.effective_cap - metrics.energy_distributed;
        double absorbed =
            std::min(surplus, config.battery->capacity - after_discharge);
        absorbed = std::max(0.0, absorbed);
        double solar_to_battery = metrics.solar_produced - metrics.grid_bonus;
        CHECK(metrics.battery_available ==
              doctest::Approx(after_discharge + absorbed + solar_to_battery)
                  .epsilon(1e-9));
        previous_charge = metrics.battery_available;
    }
}

TEST_CASE("solar overflow raises the next round's effective cap") {
    GridConfig config = busy_config();
    config.battery = StorageConfig{0.5, 0.5}; // tiny battery overflows often
    RunResult run = run_simulation(config, 0);
    bool saw_bonus = false;
    for (std::size_t r = 0; r + 1 < run.rounds.size(); ++r) {
        CHECK(run.rounds[r + 1].effective_cap ==
              doctest::Approx(config.energy_cap + run.rounds[r].grid_bonus)
                  .epsilon(1e-12));
        saw_bonus = saw_bonus || run.rounds[r].grid_bonus > 0.0;
    }
    CHECK(saw_bonus);
}

TEST_CASE("only special users receive battery energy") {
    GridConfig config = busy_config();
    config.n_special_users = 5;
    World world(config, 3);
    for (std::size_t r = 0; r < config.n_rounds; ++r) {
        std::map<std::uint32_t, bool> queued_before;
        for (const PendingRequest& entry : world.queue) {
            queued_before[entry.user_id] = true;
        }
        double battery_charge_before =
            world.battery ? world.battery->charge : 0.0;
        (void)battery_charge_before;
        RoundMetrics metrics = round_step(world, config);
        if (metrics.customers_received_battery > 0.0) {
            // Battery recipients left the queue without a grid grant;
            // they must all be special (ids below n_special_users).
            // Reconstruct them: queued before, not queued now, ON.
            for (const auto& [user, was] : queued_before) {
                (void)was;
                const UserState& state = world.users[user];
                if (!state.queued() && state.on && user >= config.n_special_users) {
                    // A non-special user may only have left via a grid
                    // grant, which counts in satisfied_from_queue.
                    CHECK(metrics.customers_satisfied_from_queue > 0.0);
                }
            }
        }
    }
}

TEST_CASE("queued requests stay frozen until granted or dropped") {
    GridConfig config;
    config.n_users = 60;
    config.energy_cap = 8.0; // heavy pressure, queue forms fast
    config.p_request = 0.8;
    config.p_stay_on = 0.8;
    config.p_stay_queue = 1.0;
    config.n_rounds = 40;
    World world(config, 1);

    std::map<std::uint32_t, Energy> frozen;
    for (std::size_t r = 0; r < config.n_rounds; ++r) {
        round_step(world, config);
        for (const PendingRequest& entry : world.queue) {
            auto it = frozen.find(entry.user_id);
            if (it != frozen.end()) {
                CHECK(entry.amount == it->second);
            }
        }
        frozen.clear();
        for (const PendingRequest& entry : world.queue) {
            frozen[entry.user_id] = entry.amount;
        }
    }
    CHECK_FALSE(frozen.empty());
}

TEST_CASE("with p_change_queue_status queued amounts may redraw") {
    GridConfig config;
    config.n_users = 60;
    config.energy_cap = 8.0;
    config.p_request = 0.8;
    config.p_stay_on = 0.8;
    config.p_stay_queue = 1.0;
    config.p_change_queue_status = 1.0; // redraw every round
    config.n_rounds = 30;
    World world(config, 1);

    std::map<std::uint32_t, Energy> previous;
    bool changed = false;
    for (std::size_t r = 0; r < config.n_rounds; ++r) {
        round_step(world, config);
        for (const PendingRequest& entry : world.queue) {
            auto it = previous.find(entry.user_id);
            if (it != previous.end() && entry.amount != it->second) changed = true;
        }
        previous.clear();
        for (const PendingRequest& entry : world.queue) {
            previous[entry.user_id] = entry.amount;
        }
    }
    CHECK(changed);
}

TEST_CASE("a dropped request turns its user OFF") {
    GridConfig config;
    config.n_users = 40;
    config.energy_cap = 4.0;
    config.p_request = 1.0;
    config.p_stay_on = 1.0;
    config.p_stay_queue = 0.0; // every queued request drops next round
    config.n_rounds = 1;
    World world(config, 2);
    round_step(world, config);
    REQUIRE_FALSE(world.queue.empty());
    std::set<std::uint32_t> queued_users;
    for (const PendingRequest& entry : world.queue) {
        queued_users.insert(entry.user_id);
    }

    RoundMetrics metrics = round_step(world, config);
    CHECK(metrics.customers_dropped == static_cast<double>(queued_users.size()));
    for (std::uint32_t user : queued_users) {
        CHECK_FALSE(world.users[user].queued());
        // Dropped before the demand step; a user may turn ON again with a
        // fresh request, but never keeps the dropped amount silently.
        if (world.users[user].queued()) continue;
    }
}

TEST_CASE("satisfaction takes exactly one round more than the wait") {
    GridConfig config;
    config.n_users = 150;
    config.energy_cap = 25.0;
    config.p_request = 0.6;
    config.p_stay_on = 0.6;
    config.p_stay_queue = 1.0;
    config.n_rounds = 60;

    // External episode reconstruction from queue membership.
    World world(config, 5);
    std::map<std::uint32_t, std::size_t> entered_at;
    std::vector<double> waits;
    for (std::size_t r = 0; r < config.n_rounds; ++r) {
        std::set<std::uint32_t> before;
        for (const PendingRequest& entry : world.queue) before.insert(entry.user_id);
        round_step(world, config);
        std::set<std::uint32_t> after;
        for (const PendingRequest& entry : world.queue) after.insert(entry.user_id);

        for (std::uint32_t user : before) {
            if (!after.contains(user)) {
                // p_stay_queue = 1 and no battery: exits are grid grants.
                waits.push_back(static_cast<double>(r - entered_at[user]));
                entered_at.erase(user);
            }
        }
        for (std::uint32_t user : after) {
            if (!before.contains(user)) entered_at[user] = r;
        }
    }
    REQUIRE_FALSE(waits.empty());

    double mean_wait = 0.0;
    for (double w : waits) mean_wait += w;
    mean_wait /= static_cast<double>(waits.size());

    RunWaitStats stats = world.episodes.finish(world.queue.size());
    CHECK(stats.satisfied_episodes == waits.size());
    CHECK(stats.rounds_to_satisfaction ==
          doctest::Approx(mean_wait + 1.0).epsilon(1e-12));
}

TEST_CASE("paired seeds: the battery run delivers at least as much") {
    GridConfig config;
    config.n_users = 300;
    config.energy_cap = 60.0;
    config.p_stay_queue = 1.0;
    config.n_special_users = 30;
    config.n_rounds = 50;
    config.seed = 321;

    GridConfig with = config;
    with.battery = StorageConfig{6.0, 6.0};

    for (std::uint64_t replica = 0; replica < 3; ++replica) {
        RunResult without_battery = run_simulation(config, replica);
        RunResult with_battery = run_simulation(with, replica);
        double total_without = 0.0;
        double total_with = 0.0;
        for (const RoundMetrics& metrics : without_battery.rounds) {
            total_without += metrics.total_delivered;
        }
        for (const RoundMetrics& metrics : with_battery.rounds) {
            total_with += metrics.total_delivered;
        }
        CHECK(total_with >= total_without);
    }
}

TEST_CASE("injected requests bypass the demand step in round 0") {
    GridConfig config;
    config.n_users = 4;
    config.energy_cap = 1.0;
    config.n_rounds = 1;
    std::vector<Energy> injected{0.5, 0.0, 0.25, 0.0};
    RunResult run = run_simulation(config, 0, &injected);
    CHECK(run.rounds[0].customers_requested == 2.0);
    CHECK(run.rounds[0].energy_requested == doctest::Approx(0.75));
}

TEST_CASE("the config digest distinguishes configs and not replicas") {
    GridConfig a = busy_config();
    GridConfig b = busy_config();
    CHECK(config_digest(a) == config_digest(b));
    b.energy_cap += 1.0;
    CHECK(config_digest(a) != config_digest(b));
}
