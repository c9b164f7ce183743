#include "wavegraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavegraph {

namespace {

std::uint64_t pair_key(NodeId a, NodeId b) {
    auto lo = static_cast<std::uint64_t>(std::min(a, b));
    auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (hi << 32) | lo;
}

}  // namespace

Graph::Graph(const GraphSpec& spec) {
    if (spec.nodes.empty()) throw std::invalid_argument("graph has no nodes");
    coord_dim_ = spec.nodes.front().coord.size();
    for (const NodeSpec& n : spec.nodes) {
        if (!(n.mass > 0.0) || !std::isfinite(n.mass))
            throw std::invalid_argument("node '" + n.id + "' has non-positive mass");
        if (n.coord.size() != coord_dim_)
            throw std::invalid_argument("node '" + n.id + "' coordinate dimension mismatch");
        auto id = static_cast<NodeId>(names_.size());
        if (!index_.emplace(n.id, id).second)
            throw std::invalid_argument("duplicate node id '" + n.id + "'");
        names_.push_back(n.id);
        mass_.push_back(n.mass);
        inv_mass_.push_back(1.0 / n.mass);
        fixed_.push_back(n.boundary == Boundary::fixed ? 1 : 0);
        coords_.insert(coords_.end(), n.coord.begin(), n.coord.end());
    }
    if (names_.size() > (std::size_t{1} << 31)) throw std::invalid_argument("too many nodes");

    for (const EdgeSpec& e : spec.edges) {
        auto t = find_node(e.tail);
        auto h = find_node(e.head);
        if (!t) throw std::invalid_argument("edge references unknown node '" + e.tail + "'");
        if (!h) throw std::invalid_argument("edge references unknown node '" + e.head + "'");
        if (*t == *h) throw std::invalid_argument("self-edge at node '" + e.tail + "'");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw std::invalid_argument("edge (" + e.tail + "," + e.head + ") has non-positive weight");
        auto id = static_cast<EdgeId>(weight_.size());
        if (!pair_index_.emplace(pair_key(*t, *h), id).second)
            throw std::invalid_argument("duplicate edge (" + e.tail + "," + e.head + ")");
        tail_.push_back(*t);
        head_.push_back(*h);
        weight_.push_back(e.weight);
    }
    finalize();
}

void Graph::finalize() {
    const auto nv = mass_.size();
    std::vector<std::size_t> deg(nv, 0);
    for (std::size_t e = 0; e < tail_.size(); ++e) {
        ++deg[static_cast<std::size_t>(tail_[e])];
        ++deg[static_cast<std::size_t>(head_[e])];
    }
    adj_offset_.assign(nv + 1, 0);
    for (std::size_t x = 0; x < nv; ++x) adj_offset_[x + 1] = adj_offset_[x] + deg[x];
    adjacency_.resize(adj_offset_[nv]);
    std::vector<std::size_t> fill(adj_offset_.begin(), adj_offset_.end() - 1);
    for (std::size_t e = 0; e < tail_.size(); ++e) {
        auto t = static_cast<std::size_t>(tail_[e]);
        auto h = static_cast<std::size_t>(head_[e]);
        adjacency_[fill[t]++] = {static_cast<EdgeId>(e), head_[e], true};
        adjacency_[fill[h]++] = {static_cast<EdgeId>(e), tail_[e], false};
    }

    double inv_mass_max = *std::max_element(inv_mass_.begin(), inv_mass_.end());
    double weight_max = weight_.empty() ? 0.0 : *std::max_element(weight_.begin(), weight_.end());
    std::size_t d0 = deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());

    constants_.M = std::max(inv_mass_max, weight_max);
    constants_.max_degree = static_cast<std::int64_t>(d0);
    constants_.d = std::max<double>(static_cast<double>(d0), 2.0);
    constants_.node_count = node_count();
    constants_.edge_count = edge_count();
    const double size = static_cast<double>(nv + weight_.size());
    constants_.A = 2.0 * constants_.M * constants_.d * std::sqrt(size * constants_.M);
}

std::optional<NodeId> Graph::find_node(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

NodeId Graph::node(std::string_view name) const {
    auto id = find_node(name);
    if (!id) throw std::invalid_argument("unknown node '" + std::string(name) + "'");
    return *id;
}

std::optional<EdgeId> Graph::find_edge(NodeId a, NodeId b) const {
    auto it = pair_index_.find(pair_key(a, b));
    if (it == pair_index_.end()) return std::nullopt;
    return it->second;
}

std::span<const double> Graph::coord(NodeId x) const {
    return {coords_.data() + static_cast<std::size_t>(x) * coord_dim_, coord_dim_};
}

std::vector<double> Graph::unit_vector(EdgeId e) const {
    if (ring_n_) return {1.0};
    auto a = coord(tail(e));
    auto b = coord(head(e));
    std::vector<double> u(coord_dim_);
    double len = 0.0;
    for (std::size_t i = 0; i < coord_dim_; ++i) {
        u[i] = b[i] - a[i];
        len += u[i] * u[i];
    }
    len = std::sqrt(len);
    if (!(len > 0.0))
        throw std::invalid_argument("edge (" + name(tail(e)) + "," + name(head(e)) +
                                    ") has coincident endpoint coordinates");
    for (double& c : u) c /= len;
    return u;
}

Graph build_graph(const GraphSpec& spec) { return Graph(spec); }

Graph ring_graph(std::int64_t n) {
    if (n < 3) throw std::invalid_argument("ring requires n ≥ 3");
    Graph g;
    const double nd = static_cast<double>(n);
    g.coord_dim_ = 1;
    for (std::int64_t k = 0; k < n; ++k) {
        auto name = std::to_string(k);
        g.index_.emplace(name, k);
        g.names_.push_back(std::move(name));
        g.mass_.push_back(1.0 / nd);
        g.inv_mass_.push_back(nd);
        g.fixed_.push_back(0);
        g.coords_.push_back(static_cast<double>(k) / nd);
    }
    for (std::int64_t k = 0; k < n; ++k) {
        NodeId next = (k + 1) % n;
        g.pair_index_.emplace(pair_key(k, next), k);
        g.tail_.push_back(k);
        g.head_.push_back(next);
        g.weight_.push_back(nd);
    }
    g.ring_n_ = n;
    g.finalize();
    return g;
}

}  // namespace wavegraph
