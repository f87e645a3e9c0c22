#pragma once

#include <cstdint>
#include <vector>

namespace sbd {

// Deterministic random stream used everywhere randomness is needed.
//
// Algorithm: xoshiro256** (Blackman/Vigna), state expanded from a single
// 64-bit seed with splitmix64. Derived streams mix a stream tag into the
// seed through splitmix64 before expansion, so (seed, tag) pairs give
// independent, reproducible sequences. All distributions below are defined
// in terms of next() exactly as written here; no global or thread-local
// state is involved.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t seed, std::uint64_t stream_tag);

    std::uint64_t next();

    // 53-bit mantissa uniform in [0, 1).
    double next_double();

    // Unbiased uniform in [0, n) via rejection sampling; n must be > 0.
    std::uint64_t below(std::uint64_t n);

    // Inclusive integer range.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    double uniform(double lo, double hi);

    // Box-Muller without caching: consumes two uniforms per draw.
    double normal();

    bool bernoulli(double p);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t tag);

private:
    std::uint64_t state_[4];
};

} // namespace sbd
