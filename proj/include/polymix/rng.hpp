#pragma once

#include <cstdint>

namespace polymix {

// SplitMix64 finalizer. Pure integer arithmetic, identical on every platform.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Counter-based stream: output i of stream (seed, index) is
// mix64(key + i*kGolden), so streams are splittable and value-like.
// Substream `index` of the same master seed never shares outputs with
// substream `index'` for any practical counter range.
class RngStream {
public:
    RngStream() noexcept : RngStream(0, 0) {}

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
        : master_seed_(master_seed), stream_index_(stream_index) {
        std::uint64_t key = mix64(master_seed + kGolden);
        key = mix64(key ^ (stream_index + 0x5851f42d4c957f2dULL));
        state_ = key;
    }

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }

    std::uint64_t next_u64() noexcept {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in the open interval (0,1); never returns an endpoint.
    double next_unit_open() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // One fair bit.
    bool next_bit() noexcept { return (next_u64() >> 63) != 0; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t state_;
};

} // namespace polymix
