// Round orchestrator: one discrete request-grant cycle per call.
//
// Round order: queue attrition, queued-amount redraw (only when
// p_change_queue_status > 0), demand step on non-queued users, merge of
// queued and fresh requests, capacity-capped allocation, battery/solar
// step, metrics. Solar overflow raises the next round's effective cap.

#ifndef DPN_SIMULATION_HPP
#define DPN_SIMULATION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "dpn/metrics.hpp"
#include "dpn/rng.hpp"
#include "dpn/storage.hpp"
#include "dpn/types.hpp"

namespace dpn {

// Per-user queue-episode bookkeeping feeding RunWaitStats.
class EpisodeTracker {
public:
    explicit EpisodeTracker(std::size_t n_users);

    void on_enqueued(std::uint32_t user, std::uint32_t round);
    void on_round_waited(std::uint32_t user);
    void on_satisfied(std::uint32_t user, std::uint32_t round, bool from_battery);
    void on_dropped(std::uint32_t user);
    void on_requested_battery(std::uint32_t user);

    // Closes still-open episodes as censored and returns the stats.
    RunWaitStats finish(std::size_t queue_size_at_end) const;

private:
    struct UserTrack {
        std::uint32_t enqueue_round = 0;
        std::uint32_t rounds_waited = 0;
        bool in_queue = false;
        bool ever_queued = false;
        bool ever_satisfied = false;
        bool ever_requested_battery = false;
        bool ever_received_battery = false;
    };

    std::vector<UserTrack> users_;
    std::uint64_t episodes_ = 0;
    std::uint64_t episode_rounds_ = 0;
    std::uint64_t satisfied_episodes_ = 0;
    std::uint64_t satisfaction_rounds_ = 0;
    std::uint64_t battery_episodes_ = 0;
    std::uint64_t battery_wait_rounds_ = 0;
};

struct World {
    std::vector<UserState> users;
    Queue queue;
    std::optional<StorageUnit> battery;
    Energy pending_grid_bonus = 0.0;
    std::uint32_t round = 0;
    RngBundle rng;
    EpisodeTracker episodes;

    World(const GridConfig& config, std::uint64_t replica);
};

// Executes one round and returns its metrics. When injected_requests is
// non-null and this is round 0, the demand step is bypassed and the
// given per-user amounts become the round's requests.
RoundMetrics round_step(World& world, const GridConfig& config,
                        const std::vector<Energy>* injected_requests = nullptr);

struct RunResult {
    std::vector<RoundMetrics> rounds;
    RunWaitStats waits;
    std::uint64_t config_digest = 0;
};

// Runs config.n_rounds rounds for one replica index. Replicas with the
// same seed and config are bit-identical; distinct replicas use
// independent substreams.
RunResult run_simulation(const GridConfig& config, std::uint64_t replica,
                         const std::vector<Energy>* injected_requests = nullptr);

std::uint64_t config_digest(const GridConfig& config);

} // namespace dpn

#endif // DPN_SIMULATION_HPP
