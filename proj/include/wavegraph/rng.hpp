#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wavegraph {

using Rng = std::mt19937_64;

/// Stream for one replica. The engine is seeded through std::seed_seq with the
/// 32-bit halves of (master seed, replica index), so a replica's trajectory
/// depends only on that pair and not on thread scheduling.
inline Rng replica_rng(std::uint64_t master_seed, std::uint64_t replica) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32)};
    return Rng(seq);
}

/// Uniform on the open interval (0, 1) from the top 53 bits.
inline double uniform_open(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Exponential with the given rate; always strictly positive.
inline double exponential(Rng& rng, double rate) { return -std::log(uniform_open(rng)) / rate; }

}  // namespace wavegraph
