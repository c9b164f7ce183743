#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wavegraph/field.hpp"
#include "wavegraph/graph.hpp"
#include "wavegraph/lattice.hpp"
#include "wavegraph/rate_index.hpp"

namespace wavegraph {

enum class EntityKind : std::uint8_t { node, edge };

struct Entity {
    EntityKind kind;
    std::int64_t id;

    friend bool operator==(const Entity&, const Entity&) = default;
};

template <class G>
concept GraphTopology = requires(const G& g, NodeId x, EdgeId e) {
    { G::is_lazy } -> std::convertible_to<bool>;
    { g.inv_mass(x) } -> std::convertible_to<double>;
    { g.weight(e) } -> std::convertible_to<double>;
    { g.tail(e) } -> std::convertible_to<NodeId>;
    { g.head(e) } -> std::convertible_to<NodeId>;
    { g.is_fixed(x) } -> std::convertible_to<bool>;
    { g.degree(x) } -> std::convertible_to<std::int64_t>;
    { g.constants() } -> std::convertible_to<const GraphConstants&>;
};

/// Integer-valued state with finite support, the IPS configuration.
///
/// Every node and edge that has ever been touched owns a slot; the slot keeps
/// the count and its per-unit rate (1/m_x for nodes, k_xy for edges), and the
/// rate index holds rate * |count|, so total_rate() == ||f||_1. On finite
/// graphs the slots are preallocated (nodes first, then edges); on lazy
/// lattices they are created on first touch.
template <GraphTopology G>
class ParticleState {
public:
    static constexpr std::int64_t value_limit = std::int64_t{1} << 40;

    explicit ParticleState(const G& graph) : graph_(&graph) {
        if constexpr (!G::is_lazy) {
            const auto nv = static_cast<std::size_t>(graph.node_count());
            const auto ne = static_cast<std::size_t>(graph.edge_count());
            value_.assign(nv + ne, 0);
            unit_.resize(nv + ne);
            for (std::size_t x = 0; x < nv; ++x) unit_[x] = graph.inv_mass(static_cast<NodeId>(x));
            for (std::size_t e = 0; e < ne; ++e) unit_[nv + e] = graph.weight(static_cast<EdgeId>(e));
            index_.reserve(nv + ne);
        }
    }

    const G& graph() const { return *graph_; }

    std::int64_t node(NodeId x) const {
        auto s = find_node_slot(x);
        return s ? value_[*s] : 0;
    }
    std::int64_t edge(EdgeId e) const {
        auto s = find_edge_slot(e);
        return s ? value_[*s] : 0;
    }
    void set_node(NodeId x, std::int64_t v) { assign(node_slot(x), v); }
    void set_edge(EdgeId e, std::int64_t v) { assign(edge_slot(e), v); }

    double total_rate() const { return index_.total(); }
    bool absorbing() const { return !(index_.total() > 0.0); }

    std::size_t slot_count() const { return value_.size(); }
    std::int64_t value(std::size_t slot) const { return value_[slot]; }
    double unit_weight(std::size_t slot) const { return unit_[slot]; }
    const RateIndex& rates() const { return index_; }

    Entity entity(std::size_t slot) const {
        if constexpr (G::is_lazy) {
            return entity_[slot];
        } else {
            const auto nv = static_cast<std::size_t>(graph_->node_count());
            return slot < nv ? Entity{EntityKind::node, static_cast<std::int64_t>(slot)}
                             : Entity{EntityKind::edge, static_cast<std::int64_t>(slot - nv)};
        }
    }

    std::size_t node_slot(NodeId x) {
        if constexpr (G::is_lazy) {
            return lazy_slot(node_slots_, x, EntityKind::node, graph_->inv_mass(x));
        } else {
            if (x < 0 || x >= graph_->node_count()) throw std::out_of_range("node id out of range");
            return static_cast<std::size_t>(x);
        }
    }
    std::size_t edge_slot(EdgeId e) {
        if constexpr (G::is_lazy) {
            return lazy_slot(edge_slots_, e, EntityKind::edge, graph_->weight(e));
        } else {
            if (e < 0 || e >= graph_->edge_count()) throw std::out_of_range("edge id out of range");
            return static_cast<std::size_t>(graph_->node_count() + e);
        }
    }

    void add(std::size_t slot, std::int64_t delta) { assign(slot, value_[slot] + delta); }

    /// Sum of unit * |value|, evaluated afresh.
    double recompute_l1() const {
        double s = 0.0;
        for (std::size_t i = 0; i < value_.size(); ++i) s += unit_[i] * static_cast<double>(std::abs(value_[i]));
        return s;
    }

    template <class Fn>
    void for_each_nonzero(Fn&& fn) const {
        for (std::size_t i = 0; i < value_.size(); ++i) {
            if (value_[i] != 0) fn(entity(i), value_[i], unit_[i]);
        }
    }

    std::size_t support_size() const {
        std::size_t n = 0;
        for (auto v : value_) n += v != 0 ? 1 : 0;
        return n;
    }

private:
    void assign(std::size_t slot, std::int64_t v) {
        assert(v < value_limit && v > -value_limit);
        value_[slot] = v;
        index_.set(slot, unit_[slot] * static_cast<double>(v < 0 ? -v : v));
    }

    std::optional<std::size_t> find_node_slot(NodeId x) const {
        if constexpr (G::is_lazy) {
            auto it = node_slots_.find(x);
            if (it == node_slots_.end()) return std::nullopt;
            return it->second;
        } else {
            if (x < 0 || x >= graph_->node_count()) throw std::out_of_range("node id out of range");
            return static_cast<std::size_t>(x);
        }
    }
    std::optional<std::size_t> find_edge_slot(EdgeId e) const {
        if constexpr (G::is_lazy) {
            auto it = edge_slots_.find(e);
            if (it == edge_slots_.end()) return std::nullopt;
            return it->second;
        } else {
            if (e < 0 || e >= graph_->edge_count()) throw std::out_of_range("edge id out of range");
            return static_cast<std::size_t>(graph_->node_count() + e);
        }
    }

    std::size_t lazy_slot(std::unordered_map<std::int64_t, std::size_t>& map, std::int64_t id, EntityKind kind,
                          double unit) {
        auto [it, inserted] = map.try_emplace(id, value_.size());
        if (inserted) {
            value_.push_back(0);
            unit_.push_back(unit);
            entity_.push_back({kind, id});
            if (value_.size() > index_.size()) index_.reserve(value_.size());
        }
        return it->second;
    }

    const G* graph_;
    std::vector<std::int64_t> value_;
    std::vector<double> unit_;
    RateIndex index_;
    // lazy graphs only
    std::vector<Entity> entity_;
    std::unordered_map<std::int64_t, std::size_t> node_slots_;
    std::unordered_map<std::int64_t, std::size_t> edge_slots_;
};

/// Weighted alpha-norm of an integer state (alpha = inf: unweighted max).
template <class G>
double norm_alpha(const ParticleState<G>& f, double alpha) {
    if (!(alpha >= 1.0)) throw std::invalid_argument("norm exponent must be >= 1");
    double s = 0.0;
    if (std::isinf(alpha)) {
        for (std::size_t i = 0; i < f.slot_count(); ++i) s = std::max(s, std::abs(static_cast<double>(f.value(i))));
        return s;
    }
    for (std::size_t i = 0; i < f.slot_count(); ++i) {
        double v = std::abs(static_cast<double>(f.value(i)));
        if (v == 0.0) continue;
        s += f.unit_weight(i) * (alpha == 1.0 ? v : alpha == 2.0 ? v * v : std::pow(v, alpha));
    }
    return alpha == 1.0 ? s : alpha == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / alpha);
}

/// Builds a state from node and edge values, which must be integers.
template <class G>
ParticleState<G> init_state(const G& graph, const std::vector<std::pair<NodeId, double>>& nodes,
                            const std::vector<std::pair<EdgeId, double>>& edges) {
    auto as_count = [](double v) {
        if (!std::isfinite(v) || std::floor(v) != v) throw std::invalid_argument("particle counts must be integers");
        if (std::abs(v) >= static_cast<double>(ParticleState<G>::value_limit))
            throw std::invalid_argument("particle count exceeds supported range");
        return static_cast<std::int64_t>(v);
    };
    ParticleState<G> s(graph);
    for (const auto& [x, v] : nodes) s.set_node(x, as_count(v));
    for (const auto& [e, v] : edges) s.set_edge(e, as_count(v));
    return s;
}

/// State with the values of an integer-valued field.
ParticleState<Graph> init_state(const Graph& graph, const Field& values);

Field to_field(const ParticleState<Graph>& state);

}  // namespace wavegraph
