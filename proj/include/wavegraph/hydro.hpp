#pragma once

#include <cstdint>
#include <vector>

#include "wavegraph/field.hpp"
#include "wavegraph/graph.hpp"
#include "wavegraph/particle_state.hpp"
#include "wavegraph/periodic.hpp"

namespace wavegraph {

/// Floored initial counts on the ring G_n:
///   f(k)         = floor(N psi(k/n))
///   f(<k, k+1>)  = floor(N n (phi((k+1)/n) - phi(k/n)))   along e_+.
struct HydroCounts {
    std::vector<std::int64_t> nodes;
    std::vector<std::int64_t> edges;
};

HydroCounts hydro_counts(std::int64_t n, std::int64_t N, const PeriodicData& data);

/// `ring` must be ring_graph(n) for some n >= 3.
ParticleState<Graph> hydro_init(const Graph& ring, std::int64_t N, const PeriodicData& data);

/// The unfloored target N n zeta, with zeta(k) = psi(k/n)/n and
/// zeta(<k,k+1>) = phi((k+1)/n) - phi(k/n). Its difference from the floored
/// counts is the rounding residual of the initial data.
Field hydro_target(const Graph& ring, std::int64_t N, const PeriodicData& data);

/// zeta on the ring for the ODE: nodes m psi(k/n), edges phi((k+1)/n) - phi(k/n).
Field ring_zeta(const Graph& ring, const PeriodicData& data);

}  // namespace wavegraph
