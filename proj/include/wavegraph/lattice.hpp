#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wavegraph/graph.hpp"

namespace wavegraph {

/// Integer lattice Z^d with uniform mass and weight, never enumerated.
///
/// Nodes are identified by their packed coordinates; the edge from x to
/// x + e_j has id `node_id(x) * dim + j` and is oriented from x to x + e_j
/// (lexicographically smaller endpoint first). Whatever a simulation touches
/// is materialized by the particle state, not here, so one instance can be
/// shared by any number of concurrent replicas.
class LatticeGraph {
public:
    static constexpr bool is_lazy = true;
    static constexpr std::int64_t max_dimension = 8;

    LatticeGraph(std::int64_t dimension, double mass, double weight);

    std::int64_t dimension() const { return dim_; }

    double mass(NodeId) const { return mass_; }
    double inv_mass(NodeId) const { return inv_mass_; }
    bool is_fixed(NodeId) const { return false; }
    double weight(EdgeId) const { return weight_; }
    NodeId tail(EdgeId e) const { return e / dim_; }
    NodeId head(EdgeId e) const { return shift(e / dim_, e % dim_, +1); }
    std::int64_t degree(NodeId) const { return 2 * dim_; }
    const GraphConstants& constants() const { return constants_; }

    template <class Fn>
    void for_each_incident(NodeId x, Fn&& fn) const {
        for (std::int64_t j = 0; j < dim_; ++j) {
            NodeId back = shift(x, j, -1);
            fn(Incidence{back * dim_ + j, back, false});
            fn(Incidence{x * dim_ + j, shift(x, j, +1), true});
        }
    }

    NodeId node_id(std::span<const std::int64_t> coords) const;
    std::vector<std::int64_t> coordinates(NodeId x) const;
    EdgeId edge_id(NodeId tail, std::int64_t direction) const { return tail * dim_ + direction; }
    std::vector<NodeId> neighbors(NodeId x) const;

    /// Largest |coordinate| representable by the packed node ids.
    std::int64_t coordinate_limit() const { return bias_ - 1; }

private:
    NodeId shift(NodeId x, std::int64_t axis, std::int64_t step) const;

    std::int64_t dim_;
    double mass_;
    double inv_mass_;
    double weight_;
    int bits_;
    std::int64_t bias_;
    GraphConstants constants_;
};

LatticeGraph lattice_graph(std::int64_t dimension, double mass, double weight);

}  // namespace wavegraph
