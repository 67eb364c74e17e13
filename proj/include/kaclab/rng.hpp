#pragma once

#include <cmath>
#include <cstdint>

namespace kaclab {

/// Counter-based random stream. A stream is identified by (master_seed,
/// stream_index); distinct pairs give independent sequences and the same pair
/// replays the identical sequence bit-for-bit. Creation is O(1), so each
/// Monte Carlo sample can own its stream regardless of shard layout.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : key_(mix(mix(master_seed) ^ mix(stream_index + kGolden))) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

    /// Uniform draw in the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the partner draw is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * M_PI * u2;
        cached_ = r * std::sin(angle);
        have_cached_ = true;
        return r * std::cos(angle);
    }

    /// Uniform index in [0, n) by multiply-shift.
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    std::uint64_t draw_counter() const { return counter_; }

  private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z += kGolden;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace kaclab
