#include "sbc/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbc {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0, std::uint32_t k1) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM4x32A, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM4x32B, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::philox_block(std::uint64_t seed,
                                                     std::uint64_t stream_id,
                                                     std::uint64_t counter) {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter),
        static_cast<std::uint32_t>(counter >> 32),
        static_cast<std::uint32_t>(stream_id),
        static_cast<std::uint32_t>(stream_id >> 32),
    };
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    for (int r = 0; r < 10; ++r) {
        philox_round(ctr, k0, k1);
        k0 += kPhiloxW32A;
        k1 += kPhiloxW32B;
    }
    return ctr;
}

void RngStream::refill() {
    block_ = philox_block(seed_, stream_, counter_++);
    pos_ = 0;
}

std::uint32_t RngStream::next_u32() {
    if (pos_ >= 4) refill();
    return block_[pos_++];
}

std::uint64_t RngStream::next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double RngStream::gaussian() {
    // 1 - u keeps the log argument in (0, 1].
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t make_stream_id(StreamPurpose purpose, std::uint64_t index) {
    if (index >= (std::uint64_t{1} << 56))
        throw std::invalid_argument("rng stream index exceeds 2^56");
    return (static_cast<std::uint64_t>(purpose) << 56) | index;
}

}  // namespace sbc
