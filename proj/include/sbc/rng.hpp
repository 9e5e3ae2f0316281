#pragma once

#include <array>
#include <cstdint>

namespace sbc {

// Counter-based generator (Philox4x32-10). A stream is identified by
// (seed, stream_id); replaying the pair reproduces the identical draw
// sequence, and distinct stream_ids give statistically independent
// streams, so sampling parallelizes without changing results.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_(stream_id) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01();

    // Uniform on [lo, hi]; degenerate lo == hi returns lo.
    double uniform(double lo, double hi);

    // Standard normal via Box-Muller on two uniform draws.
    double gaussian();
    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

    static std::array<std::uint32_t, 4> philox_block(std::uint64_t seed,
                                                     std::uint64_t stream_id,
                                                     std::uint64_t counter);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int pos_ = 4;  // forces refill on first draw
};

// Stream-id composition: a purpose tag in the top byte keeps index spaces
// for base points, successor noise, trajectories, etc. disjoint.
enum class StreamPurpose : std::uint64_t {
    base_points = 0,
    successors = 1,
    trajectory_init = 2,
    trajectory_noise = 3,
    fresh_draws = 4,
};

std::uint64_t make_stream_id(StreamPurpose purpose, std::uint64_t index);

}  // namespace sbc
