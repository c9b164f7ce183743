#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wavegraph {

using NodeId = std::int64_t;
using EdgeId = std::int64_t;

// V0 nodes evolve freely, V1 nodes carry the Dirichlet data.
enum class Boundary : std::uint8_t { free, fixed };

struct Incidence {
    EdgeId edge;
    NodeId neighbor;
    bool outgoing;  // canonical orientation points away from the node
};

/// Regularity constants of a graph.
///
/// `M = max(sup 1/m_x, sup k_xy)` and `d = max(d0, 2)` where `d0` is the
/// maximal degree. `A = 2 M d sqrt((|V|+|E|) M)` only exists for finite graphs.
struct GraphConstants {
    double M = 0.0;
    double d = 2.0;
    std::int64_t max_degree = 0;
    std::optional<std::int64_t> node_count;
    std::optional<std::int64_t> edge_count;
    std::optional<double> A;

    double Md() const { return M * d; }
};

struct NodeSpec {
    std::string id;
    double mass = 1.0;
    std::vector<double> coord;
    Boundary boundary = Boundary::free;
};

struct EdgeSpec {
    std::string tail;
    std::string head;
    double weight = 1.0;
};

struct GraphSpec {
    std::vector<NodeSpec> nodes;
    std::vector<EdgeSpec> edges;
};

/// Finite weighted graph with masses, immutable after construction.
///
/// Each undirected edge is stored once; the stored (tail, head) order fixes
/// the canonical orientation, and vector fields on the edge are kept as a
/// single signed coefficient along it.
class Graph {
public:
    static constexpr bool is_lazy = false;

    explicit Graph(const GraphSpec& spec);

    std::int64_t node_count() const { return static_cast<std::int64_t>(mass_.size()); }
    std::int64_t edge_count() const { return static_cast<std::int64_t>(weight_.size()); }

    double mass(NodeId x) const { return mass_[static_cast<std::size_t>(x)]; }
    double inv_mass(NodeId x) const { return inv_mass_[static_cast<std::size_t>(x)]; }
    bool is_fixed(NodeId x) const { return fixed_[static_cast<std::size_t>(x)] != 0; }

    double weight(EdgeId e) const { return weight_[static_cast<std::size_t>(e)]; }
    NodeId tail(EdgeId e) const { return tail_[static_cast<std::size_t>(e)]; }
    NodeId head(EdgeId e) const { return head_[static_cast<std::size_t>(e)]; }

    std::span<const Incidence> incident(NodeId x) const {
        auto b = adj_offset_[static_cast<std::size_t>(x)];
        auto e = adj_offset_[static_cast<std::size_t>(x) + 1];
        return {adjacency_.data() + b, e - b};
    }
    template <class Fn>
    void for_each_incident(NodeId x, Fn&& fn) const {
        for (const Incidence& inc : incident(x)) fn(inc);
    }
    std::int64_t degree(NodeId x) const { return static_cast<std::int64_t>(incident(x).size()); }

    const GraphConstants& constants() const { return constants_; }

    const std::string& name(NodeId x) const { return names_[static_cast<std::size_t>(x)]; }
    std::optional<NodeId> find_node(std::string_view name) const;
    NodeId node(std::string_view name) const;
    std::optional<EdgeId> find_edge(NodeId a, NodeId b) const;
    std::span<const double> coord(NodeId x) const;

    /// Unit vector e_xy of the canonical orientation. Ring edges always point
    /// along +1, including the wrap-around edge <n-1, 0>.
    std::vector<double> unit_vector(EdgeId e) const;

    std::optional<std::int64_t> ring_size() const { return ring_n_; }

private:
    Graph() = default;
    void finalize();
    friend Graph ring_graph(std::int64_t n);

    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<double> mass_;
    std::vector<double> inv_mass_;
    std::vector<std::uint8_t> fixed_;
    std::vector<double> coords_;
    std::size_t coord_dim_ = 0;

    std::vector<NodeId> tail_;
    std::vector<NodeId> head_;
    std::vector<double> weight_;
    std::unordered_map<std::uint64_t, EdgeId> pair_index_;

    std::vector<std::size_t> adj_offset_;
    std::vector<Incidence> adjacency_;

    GraphConstants constants_;
    std::optional<std::int64_t> ring_n_;
};

Graph build_graph(const GraphSpec& spec);

/// Periodic ring G_n: nodes 0..n-1 at k/n, masses 1/n, weights n, edges
/// <k, k+1 mod n>. All nodes free. Requires n >= 3 (n = 2 would place two
/// edges on the same node pair).
Graph ring_graph(std::int64_t n);

}  // namespace wavegraph
