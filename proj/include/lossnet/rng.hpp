#pragma once

#include <cstdint>
#include <cmath>

namespace lossnet {

// xoshiro256++ with splitmix64 seeding. All samplers below are hand-rolled so
// that a given seed produces the same stream on every platform and toolchain;
// the standard library distributions make no such guarantee.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : origin_(seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    // Independent substream, a deterministic function of (seed, salt) only.
    // Mixes from the original seed, not the evolving state, so the substream
    // layout does not depend on how much of the parent was consumed.
    Rng fork(std::uint64_t salt) const {
        std::uint64_t x = origin_ ^ (0x9e3779b97f4a7c15ULL + salt * 0xbf58476d1ce4e5b9ULL);
        return Rng(splitmix64(x));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    // Poisson variate; exact for all means (Knuth product for small means,
    // Hormann's PTRS transformed rejection otherwise).
    long long poisson(double mean);

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
    std::uint64_t origin_;
};

} // namespace lossnet
