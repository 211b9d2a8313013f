#include "nevo/rng.hpp"

#include <cmath>
#include <numbers>

#include "nevo/errors.hpp"

namespace nevo {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

RngStream::RngStream(Seed seed, std::uint32_t label) {
    std::uint64_t sm = seed ^ (0x9E3779B97F4A7C15ull * (std::uint64_t(label) + 1));
    for (auto& word : state_) word = splitmix64(sm);
    // xoshiro must not start all-zero; splitmix makes this all but impossible,
    // the guard keeps it impossible.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
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

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
    if (n == 0) throw ContractError("uniform_int: empty range");
    const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x >= threshold) return x % n;
    }
}

double RngStream::uniform_double() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_range(double lo, double hi) {
    return lo + (hi - lo) * uniform_double();
}

double RngStream::normal() {
    // (0,1] for the log argument; one normal per pair of uniforms.
    const double u1 = 1.0 - uniform_double();
    const double u2 = uniform_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> RngStream::permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = std::size_t(uniform_int(i));
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

} // namespace nevo
