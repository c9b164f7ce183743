#include "wavegraph/field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wavegraph {

namespace {

void require_same_graph(const Field& a, const Field& b) {
    if (&a.graph() != &b.graph()) throw std::invalid_argument("fields live on different graphs");
}

}  // namespace

Field& Field::operator+=(const Field& other) {
    require_same_graph(*this, other);
    for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i] += other.nodes_[i];
    for (std::size_t i = 0; i < edges_.size(); ++i) edges_[i] += other.edges_[i];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_graph(*this, other);
    for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i] -= other.nodes_[i];
    for (std::size_t i = 0; i < edges_.size(); ++i) edges_[i] -= other.edges_[i];
    return *this;
}

Field& Field::operator*=(double s) {
    for (double& v : nodes_) v *= s;
    for (double& v : edges_) v *= s;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

double norm_alpha(const Field& f, double alpha) {
    if (!(alpha >= 1.0)) throw std::invalid_argument("norm exponent must be >= 1");
    const Graph& g = f.graph();
    if (std::isinf(alpha)) {
        double m = 0.0;
        for (double v : f.nodes()) m = std::max(m, std::abs(v));
        for (double v : f.edges()) m = std::max(m, std::abs(v));
        return m;
    }
    double sum = 0.0;
    auto nodes = f.nodes();
    auto edges = f.edges();
    if (alpha == 1.0) {
        for (std::size_t x = 0; x < nodes.size(); ++x) sum += std::abs(nodes[x]) * g.inv_mass(static_cast<NodeId>(x));
        for (std::size_t e = 0; e < edges.size(); ++e) sum += std::abs(edges[e]) * g.weight(static_cast<EdgeId>(e));
        return sum;
    }
    if (alpha == 2.0) {
        for (std::size_t x = 0; x < nodes.size(); ++x) sum += nodes[x] * nodes[x] * g.inv_mass(static_cast<NodeId>(x));
        for (std::size_t e = 0; e < edges.size(); ++e) sum += edges[e] * edges[e] * g.weight(static_cast<EdgeId>(e));
        return std::sqrt(sum);
    }
    for (std::size_t x = 0; x < nodes.size(); ++x)
        sum += std::pow(std::abs(nodes[x]), alpha) * g.inv_mass(static_cast<NodeId>(x));
    for (std::size_t e = 0; e < edges.size(); ++e)
        sum += std::pow(std::abs(edges[e]), alpha) * g.weight(static_cast<EdgeId>(e));
    return std::pow(sum, 1.0 / alpha);
}

double inner_product(const Field& f, const Field& h) {
    require_same_graph(f, h);
    const Graph& g = f.graph();
    double sum = 0.0;
    for (NodeId x = 0; x < g.node_count(); ++x) sum += f.node(x) * h.node(x) * g.inv_mass(x);
    for (EdgeId e = 0; e < g.edge_count(); ++e) sum += f.edge(e) * h.edge(e) * g.weight(e);
    return sum;
}

void apply_L(const Field& f, Field& out) {
    require_same_graph(f, out);
    const Graph& g = f.graph();
    for (NodeId x = 0; x < g.node_count(); ++x) {
        double acc = 0.0;
        for (const Incidence& inc : g.incident(x)) {
            // e_xy . f(<x,y>) is +c when the edge leaves x, -c otherwise
            double c = f.edge(inc.edge);
            acc += g.weight(inc.edge) * (inc.outgoing ? c : -c);
        }
        out.node(x) = acc;
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        NodeId x = g.tail(e);
        NodeId y = g.head(e);
        out.edge(e) = f.node(y) * g.inv_mass(y) - f.node(x) * g.inv_mass(x);
    }
}

Field apply_L(const Field& f) {
    Field out(f.graph());
    apply_L(f, out);
    return out;
}

void apply_L_masked(const Field& f, Field& out) {
    require_same_graph(f, out);
    const Graph& g = f.graph();
    for (NodeId x = 0; x < g.node_count(); ++x) {
        if (g.is_fixed(x)) {
            out.node(x) = 0.0;
            continue;
        }
        double acc = 0.0;
        for (const Incidence& inc : g.incident(x)) {
            double c = f.edge(inc.edge);
            acc += g.weight(inc.edge) * (inc.outgoing ? c : -c);
        }
        out.node(x) = acc;
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        NodeId x = g.tail(e);
        NodeId y = g.head(e);
        double fy = g.is_fixed(y) ? 0.0 : f.node(y) * g.inv_mass(y);
        double fx = g.is_fixed(x) ? 0.0 : f.node(x) * g.inv_mass(x);
        out.edge(e) = fy - fx;
    }
}

std::vector<double> apply_L2_vertex(const Field& f) {
    const Graph& g = f.graph();
    std::vector<double> out(static_cast<std::size_t>(g.node_count()), 0.0);
    for (NodeId x = 0; x < g.node_count(); ++x) {
        double fx = f.node(x) * g.inv_mass(x);
        double acc = 0.0;
        for (const Incidence& inc : g.incident(x)) {
            acc += g.weight(inc.edge) * (f.node(inc.neighbor) * g.inv_mass(inc.neighbor) - fx);
        }
        out[static_cast<std::size_t>(x)] = acc;
    }
    return out;
}

}  // namespace wavegraph
