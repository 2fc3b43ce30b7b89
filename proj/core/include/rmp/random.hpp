#pragma once

#include <array>
#include <cstdint>

namespace rmp {

// Stream purposes. Each gets a disjoint family of substreams for a given seed.
enum class StreamDomain : std::uint64_t {
    LambdaPairs = 1,
    Sigma2Triples = 2,
    TrajectoryChains = 3,
    CltChains = 4,
    Diagnostics = 5,
    User = 6,
};

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ generator. Substreams are addressed by (seed, domain, index);
/// the initial state is a SplitMix64 expansion of a hash of that triple, so any
/// chunk of a Monte Carlo run can be regenerated without touching the others.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed) noexcept { reseed(seed); }

    static RandomStream derive(std::uint64_t seed, StreamDomain domain, std::uint64_t index) noexcept {
        std::uint64_t h = seed;
        std::uint64_t mix = splitmix64(h);
        h = mix ^ (static_cast<std::uint64_t>(domain) * 0xd1342543de82ef95ULL);
        mix = splitmix64(h);
        h = mix ^ (index + 0x632be59bd9b4e019ULL);
        return RandomStream(splitmix64(h));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept { return next(); }

    result_type next() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1): never returns 0, 1 or exactly 1/2.
    double uniform_open() noexcept {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    void reseed(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace rmp
