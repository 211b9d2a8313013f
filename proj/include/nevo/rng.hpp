#pragma once

#include <cstdint>
#include <vector>

namespace nevo {

using Seed = std::uint64_t;

/// Deterministic random stream: xoshiro256** seeded through splitmix64.
///
/// The generator is self-contained so that draw sequences depend only on the
/// (seed, label) pair and never on the standard library or platform.
/// Normal draws use Box-Muller on two 53-bit uniforms, one normal per pair;
/// bounded integer draws use rejection sampling, so every draw path is
/// reproducible bit-for-bit within a build.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(Seed seed, std::uint32_t label);

    std::uint64_t next_u64();

    /// Uniform integer in [0, n). n must be >= 1.
    std::uint64_t uniform_int(std::uint64_t n);

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform_double();

    /// Uniform double in [lo, hi).
    double uniform_range(double lo, double hi);

    /// Standard normal draw, Box-Muller.
    double normal();

    /// Normal with the given standard deviation.
    double normal(double stddev) { return normal() * stddev; }

    /// In-place Fisher-Yates shuffle of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::uint64_t state_[4];
};

/// Sub-stream labels used by one generation seed; see variation_step.
enum StreamLabel : std::uint32_t {
    kLabelMutationChoice = 0,
    kLabelStructural = 1,
    kLabelPerturbation = 2,
    kLabelMaster = 3,
    kLabelInit = 4,
    kLabelEpisode = 5,
    kLabelRecord = 6,
    kLabelProbe = 7,
};

/// Stream whose draws depend only on (seed, label); distinct labels give
/// independent sub-streams of the same seed.
inline RngStream derive_stream(Seed seed, std::uint32_t label) {
    return RngStream(seed, label);
}

} // namespace nevo
