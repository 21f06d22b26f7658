#pragma once

#include <cstdint>

namespace chebyprop {

// splitmix64: tiny deterministic generator producing identical streams on
// every platform, which keeps seeded runs bit-reproducible.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound); bound > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    // Independent stream derived from (seed, tag); used to give every walk
    // source its own deterministic substream.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t tag) {
        SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ull * (tag + 1)));
        mix.next();
        return mix;
    }

private:
    std::uint64_t state_;
};

} // namespace chebyprop
