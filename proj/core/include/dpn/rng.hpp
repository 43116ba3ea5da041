// Deterministic random-number contract for the whole simulator.
//
// Generator is PCG32 (O'Neill, pcg32 variant with 64-bit state and a
// per-stream increment). It is pinned here by implementation, not by
// <random>, so that the same seed yields bit-identical trajectories on
// every platform and compiler. Each simulation concern (demand, queue,
// solar, GA, routing) draws from its own substream derived from the
// master seed and the replica index, so consuming numbers in one
// concern never shifts the draws of another.

#ifndef DPN_RNG_HPP
#define DPN_RNG_HPP

#include <cstdint>

namespace dpn {

// splitmix64 step; used only to spread seed bits when deriving streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t initstate, std::uint64_t stream_id)
        : state_(0), inc_((stream_id << 1u) | 1u) {
        next_u32();
        state_ += initstate;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted =
            static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Uniform in [0, 1) with 53 significant bits.
    double next_double() {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        std::uint64_t bits = (hi << 32) | lo;
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, max]: energy requests exclude exact zero so that
    // "request > 0" and "ON" stay equivalent.
    double uniform_pos(double max) { return max * (1.0 - next_double()); }

    // True with probability p. p = 0 never fires, p = 1 always fires.
    bool bernoulli(double p) { return next_double() < p; }

    // Uniform index in [0, n). n must be > 0.
    std::uint32_t bounded(std::uint32_t n) {
        return static_cast<std::uint32_t>(
            (static_cast<std::uint64_t>(next_u32()) * n) >> 32);
    }

    bool operator==(const RngStream&) const = default;

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

// One substream per simulation concern. Stream ids are part of the
// determinism contract; do not reorder.
struct RngBundle {
    enum Concern : std::uint64_t {
        Demand = 0,
        Queue = 1,
        Solar = 2,
        Ga = 3,
        Routing = 4,
    };

    RngStream demand;
    RngStream queue;
    RngStream solar;
    RngStream ga;
    RngStream routing;

    static RngStream derive(std::uint64_t master_seed, std::uint64_t replica,
                            Concern concern) {
        std::uint64_t s = splitmix64(master_seed);
        s = splitmix64(s ^ splitmix64(0x9E3779B97F4A7C15ULL * (replica + 1)));
        return RngStream(s, static_cast<std::uint64_t>(concern));
    }

    static RngBundle make(std::uint64_t master_seed, std::uint64_t replica) {
        return RngBundle{
            derive(master_seed, replica, Demand),
            derive(master_seed, replica, Queue),
            derive(master_seed, replica, Solar),
            derive(master_seed, replica, Ga),
            derive(master_seed, replica, Routing),
        };
    }
};

} // namespace dpn

#endif // DPN_RNG_HPP
