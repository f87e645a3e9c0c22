#include "sbd/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sbd {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_)
        word = splitmix64(s);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream_tag) : Rng(mix(seed, stream_tag)) {}

std::uint64_t Rng::mix(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed;
    std::uint64_t base = splitmix64(s);
    std::uint64_t t = tag ^ base;
    return splitmix64(t);
}

std::uint64_t Rng::next() {
    std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0)
        throw std::invalid_argument("Rng::below: n must be positive");
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % n;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi)
        throw std::invalid_argument("Rng::uniform_int: lo > hi");
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(below(span));
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

double Rng::normal() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0)
        u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

bool Rng::bernoulli(double p) {
    return next_double() < p;
}

} // namespace sbd
