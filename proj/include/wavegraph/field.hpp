#pragma once

#include <span>
#include <vector>

#include "wavegraph/graph.hpp"

namespace wavegraph {

/// Real data on nodes and edges of a finite graph. Edge entries are the
/// coefficient c in v(<x,y>) = c e_xy along the canonical orientation.
class Field {
public:
    explicit Field(const Graph& graph)
        : graph_(&graph),
          nodes_(static_cast<std::size_t>(graph.node_count()), 0.0),
          edges_(static_cast<std::size_t>(graph.edge_count()), 0.0) {}

    const Graph& graph() const { return *graph_; }

    std::span<double> nodes() { return nodes_; }
    std::span<const double> nodes() const { return nodes_; }
    std::span<double> edges() { return edges_; }
    std::span<const double> edges() const { return edges_; }

    double& node(NodeId x) { return nodes_[static_cast<std::size_t>(x)]; }
    double node(NodeId x) const { return nodes_[static_cast<std::size_t>(x)]; }
    double& edge(EdgeId e) { return edges_[static_cast<std::size_t>(e)]; }
    double edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double s);

private:
    const Graph* graph_;
    std::vector<double> nodes_;
    std::vector<double> edges_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Weighted alpha-norm: (sum |f(x)|^a / m_x + sum k_xy |f(<x,y>)|^a)^(1/a).
/// alpha = +inf gives the unweighted maximum of all absolute values.
double norm_alpha(const Field& f, double alpha);

/// [f, g]_G = sum f(x) g(x) / m_x + sum k_xy c_f c_g.
double inner_product(const Field& f, const Field& g);

/// The skew-symmetric operator L_G.
Field apply_L(const Field& f);
void apply_L(const Field& f, Field& out);

/// L_G with the node rows and node inputs of V1 masked to zero.
void apply_L_masked(const Field& f, Field& out);

/// Node part of L_G^2 through the closed form
/// sum_{y~x} k_xy (f(y)/m_y - f(x)/m_x).
std::vector<double> apply_L2_vertex(const Field& f);

}  // namespace wavegraph
