#pragma once

#include <array>
#include <cstdint>

namespace spikecnn {

/// Deterministic random stream: xoshiro256** seeded through splitmix64.
///
/// The generator is fixed by name so that a seed plus a call sequence
/// produces the same draws on every platform. Streams for distinct
/// purposes (encoding, targets, shuffling, weight init) are derived
/// from one root seed with fork(), which mixes the purpose tag and two
/// indices into a child seed; forked streams are statistically
/// independent and never share state with the parent.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_fingerprint_(seed) {
        // splitmix64 expansion of the seed into the xoshiro state
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    /// Next 64 random bits (xoshiro256** step).
    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 significant bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// One Bernoulli trial. Always consumes exactly one draw.
    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // multiply-shift; bias is negligible for n << 2^64
        return static_cast<std::uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    /// Derive an independent child stream keyed by (purpose, a, b).
    RngStream fork(std::uint64_t purpose, std::uint64_t a = 0, std::uint64_t b = 0) const {
        std::uint64_t h = seed_fingerprint_;
        h = mix(h ^ purpose);
        h = mix(h ^ a);
        h = mix(h ^ b);
        return RngStream(h);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> state_{};
    std::uint64_t seed_fingerprint_ = 0;
};

/// Purpose tags for RngStream::fork. One root seed in the config fans
/// out through these so that every stochastic component is individually
/// reproducible.
namespace rng_purpose {
inline constexpr std::uint64_t encode = 1;
inline constexpr std::uint64_t target = 2;
inline constexpr std::uint64_t shuffle = 3;
inline constexpr std::uint64_t weight_init = 4;
inline constexpr std::uint64_t eval = 5;
inline constexpr std::uint64_t probe = 6;
}  // namespace rng_purpose

}  // namespace spikecnn
