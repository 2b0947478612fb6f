#pragma once

#include <cmath>
#include <cstdint>

namespace fieldscan {

// Repository-wide PRNG: the splitmix64 output function evaluated on a
// (key, counter) pair. Counter-based so per-site noise can be drawn in any
// order (and in parallel) with bit-identical results. Identified in run
// manifests as kPrngId.
inline constexpr const char* kPrngId = "splitmix64-ctr-v1";
inline constexpr const char* kLibraryVersion = "0.1.0";

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Named sub-streams so channel noise, source sampling, expert draws, etc.
// never collide even under the same user seed.
enum class RngStream : std::uint64_t {
    channel = 1,
    source = 2,
    expert_draw = 3,
    scanner = 4,
    trial = 5,
    misc = 6,
};

inline std::uint64_t derive_key(std::uint64_t seed, RngStream stream) {
    return mix64(seed ^ mix64(static_cast<std::uint64_t>(stream) ^ 0xD1B54A32D192ED03ULL));
}

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}
    CounterRng(std::uint64_t seed, RngStream stream) : key_(derive_key(seed, stream)) {}

    std::uint64_t bits(std::uint64_t counter) const {
        return mix64(key_ + (counter + 1) * 0x9E3779B97F4A7C15ULL);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Standard normal; consumes the counter pair (2c, 2c+1) via Box-Muller.
    double normal(std::uint64_t counter) const {
        double u1 = uniform(2 * counter);
        double u2 = uniform(2 * counter + 1);
        if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    std::uint64_t key() const { return key_; }

  private:
    std::uint64_t key_;
};

// Sequential convenience wrapper over a CounterRng (single-owner).
class SequentialRng {
  public:
    explicit SequentialRng(std::uint64_t key) : rng_(key) {}
    SequentialRng(std::uint64_t seed, RngStream stream) : rng_(seed, stream) {}

    double next_uniform() { return rng_.uniform(counter_++); }
    double next_normal() {
        double u1 = next_uniform();
        double u2 = next_uniform();
        if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Unbiased integer in [0, n) by Lemire's multiply-shift rejection.
    std::uint64_t next_below(std::uint64_t n) {
        for (;;) {
            std::uint64_t x = rng_.bits(counter_++);
            __uint128_t m = static_cast<__uint128_t>(x) * n;
            std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= n || lo >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
        }
    }

  private:
    CounterRng rng_;
    std::uint64_t counter_ = 0;
};

}  // namespace fieldscan
