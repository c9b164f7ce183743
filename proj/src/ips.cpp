#include <cmath>
#include <stdexcept>

#include "wavegraph/hydro.hpp"
#include "wavegraph/particle_state.hpp"
#include "wavegraph/simulator.hpp"

namespace wavegraph {

ParticleState<Graph> init_state(const Graph& graph, const Field& values) {
    if (&values.graph() != &graph) throw std::invalid_argument("field lives on a different graph");
    std::vector<std::pair<NodeId, double>> nodes;
    std::vector<std::pair<EdgeId, double>> edges;
    for (NodeId x = 0; x < graph.node_count(); ++x) {
        if (values.node(x) != 0.0) nodes.emplace_back(x, values.node(x));
    }
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        if (values.edge(e) != 0.0) edges.emplace_back(e, values.edge(e));
    }
    return init_state(graph, nodes, edges);
}

Field to_field(const ParticleState<Graph>& state) {
    const Graph& g = state.graph();
    Field f(g);
    for (NodeId x = 0; x < g.node_count(); ++x) f.node(x) = static_cast<double>(state.node(x));
    for (EdgeId e = 0; e < g.edge_count(); ++e) f.edge(e) = static_cast<double>(state.edge(e));
    return f;
}

std::uint64_t yule_simulate(double lambda, std::int64_t r, double T, Rng& rng) {
    if (!(lambda > 0.0)) throw std::invalid_argument("Yule rate must be positive");
    if (r < 1) throw std::invalid_argument("Yule start must be at least 1");
    double t = 0.0;
    std::uint64_t k = 0;
    for (;;) {
        t += exponential(rng, static_cast<double>(r + static_cast<std::int64_t>(k)) * lambda);
        if (t > T) return k;
        ++k;
    }
}

namespace {

void validate_ring(const Graph& ring) {
    if (!ring.ring_size()) throw std::invalid_argument("hydrodynamic initial data needs a ring graph");
}

}  // namespace

HydroCounts hydro_counts(std::int64_t n, std::int64_t N, const PeriodicData& data) {
    if (n < 3) throw std::invalid_argument("ring requires n ≥ 3");
    if (N < 1) throw std::invalid_argument("particle density N must be at least 1");
    HydroCounts c;
    c.nodes.resize(static_cast<std::size_t>(n));
    c.edges.resize(static_cast<std::size_t>(n));
    const double nd = static_cast<double>(n);
    const double Nd = static_cast<double>(N);
    for (std::int64_t k = 0; k < n; ++k) {
        const double x = static_cast<double>(k) / nd;
        const double x1 = static_cast<double>(k + 1) / nd;
        c.nodes[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(std::floor(Nd * data.psi.value(x)));
        c.edges[static_cast<std::size_t>(k)] =
            static_cast<std::int64_t>(std::floor(Nd * nd * (data.phi.value(x1) - data.phi.value(x))));
    }
    return c;
}

ParticleState<Graph> hydro_init(const Graph& ring, std::int64_t N, const PeriodicData& data) {
    validate_ring(ring);
    auto counts = hydro_counts(*ring.ring_size(), N, data);
    ParticleState<Graph> s(ring);
    for (std::size_t k = 0; k < counts.nodes.size(); ++k) {
        s.set_node(static_cast<NodeId>(k), counts.nodes[k]);
        s.set_edge(static_cast<EdgeId>(k), counts.edges[k]);
    }
    return s;
}

Field ring_zeta(const Graph& ring, const PeriodicData& data) {
    validate_ring(ring);
    const auto n = *ring.ring_size();
    const double nd = static_cast<double>(n);
    Field z(ring);
    for (std::int64_t k = 0; k < n; ++k) {
        const double x = static_cast<double>(k) / nd;
        const double x1 = static_cast<double>(k + 1) / nd;
        z.node(k) = data.psi.value(x) / nd;
        z.edge(k) = data.phi.value(x1) - data.phi.value(x);
    }
    return z;
}

Field hydro_target(const Graph& ring, std::int64_t N, const PeriodicData& data) {
    const auto n = *ring.ring_size();
    Field z = ring_zeta(ring, data);
    z *= static_cast<double>(N) * static_cast<double>(n);
    return z;
}

}  // namespace wavegraph
