#include "wavegraph/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavegraph {

LatticeGraph::LatticeGraph(std::int64_t dimension, double mass, double weight)
    : dim_(dimension), mass_(mass), weight_(weight) {
    if (dimension < 1 || dimension > max_dimension)
        throw std::invalid_argument("lattice dimension must be in [1, 8]");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw std::invalid_argument("lattice mass must be positive");
    if (!(weight > 0.0) || !std::isfinite(weight)) throw std::invalid_argument("lattice weight must be positive");
    inv_mass_ = 1.0 / mass;
    // node ids stay below 2^56 so that edge ids (node * dim + j) fit in 60 bits
    bits_ = static_cast<int>(56 / dim_);
    bias_ = std::int64_t{1} << (bits_ - 1);
    constants_.M = std::max(inv_mass_, weight_);
    constants_.max_degree = 2 * dim_;
    constants_.d = std::max<double>(static_cast<double>(2 * dim_), 2.0);
}

NodeId LatticeGraph::node_id(std::span<const std::int64_t> coords) const {
    if (static_cast<std::int64_t>(coords.size()) != dim_)
        throw std::invalid_argument("lattice coordinate dimension mismatch");
    std::int64_t id = 0;
    for (std::int64_t j = dim_ - 1; j >= 0; --j) {
        auto c = coords[static_cast<std::size_t>(j)];
        if (c >= bias_ || c < -bias_ + 1) throw std::out_of_range("lattice coordinate out of packed range");
        id = (id << bits_) | (c + bias_);
    }
    return id;
}

std::vector<std::int64_t> LatticeGraph::coordinates(NodeId x) const {
    std::vector<std::int64_t> c(static_cast<std::size_t>(dim_));
    const std::int64_t mask = (std::int64_t{1} << bits_) - 1;
    for (std::int64_t j = 0; j < dim_; ++j) {
        c[static_cast<std::size_t>(j)] = ((x >> (bits_ * j)) & mask) - bias_;
    }
    return c;
}

NodeId LatticeGraph::shift(NodeId x, std::int64_t axis, std::int64_t step) const {
    const std::int64_t mask = (std::int64_t{1} << bits_) - 1;
    std::int64_t field = (x >> (bits_ * axis)) & mask;
    std::int64_t moved = field + step;
    if (moved <= 0 || moved > mask) throw std::out_of_range("lattice walk left the packed coordinate range");
    return x + step * (std::int64_t{1} << (bits_ * axis));
}

std::vector<NodeId> LatticeGraph::neighbors(NodeId x) const {
    std::vector<NodeId> out;
    out.reserve(static_cast<std::size_t>(2 * dim_));
    for_each_incident(x, [&](const Incidence& inc) { out.push_back(inc.neighbor); });
    return out;
}

LatticeGraph lattice_graph(std::int64_t dimension, double mass, double weight) {
    return LatticeGraph(dimension, mass, weight);
}

}  // namespace wavegraph
