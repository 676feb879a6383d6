#pragma once

#include <cstdint>

namespace ftsim {

// SplitMix64 stream.  One instance per stochastic source (loss processes,
// workload draws), so adding a consumer never perturbs another source's
// sequence.  State for (seed, stream_id) is derived through the SplitMix64
// finalizer, which separates streams by ~2^64/phi steps of the underlying
// Weyl sequence.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : state_(mix_(seed) ^ mix_(kGamma * (stream_id + 1))) {}

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix_(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    // Uniform integer in [lo, hi] inclusive.
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
        return lo + below(hi - lo + 1);
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix_(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

// Stream ids fixed per stochastic source.
inline constexpr std::uint64_t kStreamLossForward = 1;
inline constexpr std::uint64_t kStreamLossReverse = 2;
// Workload generator k uses kStreamWorkloadBase + k.
inline constexpr std::uint64_t kStreamWorkloadBase = 16;

}  // namespace ftsim
