#pragma once

#include <cstdint>
#include <random>

namespace powecon {

/// Seeded pseudo-random stream for block arrivals.
///
/// Engine: std::mt19937_64, seeded through std::seed_seq from the 32-bit
/// halves of (seed, stream). Both are fully specified by the standard, so a
/// (seed, stream) pair yields the same sequence on every conforming library.
/// Variates are produced here by inversion rather than through the
/// implementation-defined <random> distributions.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();

    /// Exponential variate with the given mean, -mean * log(1 - U).
    double exponential(double mean);

private:
    std::mt19937_64 engine_;
};

} // namespace powecon
