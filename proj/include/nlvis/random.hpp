#pragma once

#include <cstdint>
#include <string_view>

namespace nlvis {

// SplitMix64. Small, seedable from any 64-bit value, and identical on every
// platform, which std::uniform_real_distribution is not.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

// Seed for a named sub-stream ("geometry-MC", "walker", "random-u", ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                                 std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the stream name
    for (char c : stream) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    SplitMix64 mix(seed ^ h);
    std::uint64_t a = mix.next();
    SplitMix64 mix2(a ^ (index * 0xd1b54a32d192ed03ULL));
    return mix2.next();
}

}  // namespace nlvis
