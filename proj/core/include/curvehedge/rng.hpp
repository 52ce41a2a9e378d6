#pragma once

#include <cstdint>
#include <limits>

namespace curvehedge {

/// SplitMix64 finalizer; used to derive independent stream keys from a master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator and is cheap to
/// seed, so every Monte Carlo path can own its stream.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) {
        // splitmix64 sequence seeding; never yields the all-zero state.
        std::uint64_t x = seed;
        for (auto& s : state_) {
            s = splitmix64(x);
            x += 0x9e3779b97f4a7c15ULL;
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
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

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

/// Master seed plus the stream layout: path p draws from stream(p); within a
/// path, steps consume the stream in order. Results therefore do not depend on
/// how paths are distributed over workers.
struct SeedSpec {
    std::uint64_t master = 0;

    Xoshiro256 stream(std::uint64_t path) const { return Xoshiro256(mix_seed(master, path)); }
    /// Independent child seed, e.g. for the inner simulations launched at (path, date).
    SeedSpec child(std::uint64_t a, std::uint64_t b = 0) const {
        return SeedSpec{mix_seed(master ^ 0x5bd1e9955bd1e995ULL, a + 1, b + 1)};
    }
};

}  // namespace curvehedge
