#include "wavegraph/wave_ode.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace wavegraph {

Field make_zeta(const Graph& graph, std::span<const double> phi, std::span<const double> psi) {
    if (static_cast<std::int64_t>(phi.size()) != graph.node_count() ||
        static_cast<std::int64_t>(psi.size()) != graph.node_count())
        throw std::invalid_argument("phi and psi must have one value per node");
    Field zeta(graph);
    for (NodeId x = 0; x < graph.node_count(); ++x) {
        double p = psi[static_cast<std::size_t>(x)];
        if (graph.is_fixed(x) && p != 0.0)
            throw std::invalid_argument("psi must vanish on V1 (node '" + graph.name(x) + "')");
        zeta.node(x) = graph.mass(x) * p;
    }
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        zeta.edge(e) = phi[static_cast<std::size_t>(graph.head(e))] - phi[static_cast<std::size_t>(graph.tail(e))];
    }
    return zeta;
}

namespace {

void axpy(double a, const Field& x, Field& y) {
    auto xn = x.nodes();
    auto yn = y.nodes();
    for (std::size_t i = 0; i < xn.size(); ++i) yn[i] += a * xn[i];
    auto xe = x.edges();
    auto ye = y.edges();
    for (std::size_t i = 0; i < xe.size(); ++i) ye[i] += a * xe[i];
}

// y = x - a^2 L~^2 x
void apply_normal(const Field& x, Field& y, Field& scratch, double a2) {
    apply_L_masked(x, scratch);
    apply_L_masked(scratch, y);
    y *= -a2;
    axpy(1.0, x, y);
}

// Solves (I - a^2 L~^2) x = b by conjugate gradients in the [.,.]_G inner
// product, where the operator is self-adjoint and bounded below by I.
std::int64_t solve_normal(const Field& b, Field& x, double a2, const OdeOptions& opt) {
    const Graph& g = b.graph();
    Field r(g), p(g), q(g), scratch(g);
    apply_normal(x, q, scratch, a2);
    r = b;
    r -= q;
    const double bnorm = std::sqrt(inner_product(b, b));
    if (bnorm == 0.0) {
        x = Field(g);
        return 0;
    }
    double rr = inner_product(r, r);
    const double target = opt.tolerance * bnorm;
    if (std::sqrt(rr) <= target) return 0;
    p = r;
    for (std::int64_t it = 1; it <= opt.max_iterations; ++it) {
        apply_normal(p, q, scratch, a2);
        double alpha = rr / inner_product(p, q);
        axpy(alpha, p, x);
        axpy(-alpha, q, r);
        double rr_new = inner_product(r, r);
        if (std::sqrt(rr_new) <= target) return it;
        double beta = rr_new / rr;
        rr = rr_new;
        p *= beta;
        axpy(1.0, r, p);
    }
    throw SolverError("implicit midpoint linear solve did not reach residual " +
                      std::to_string(opt.tolerance) + " within " + std::to_string(opt.max_iterations) +
                      " iterations");
}

}  // namespace

OdeSolution solve_ibvp(const Graph& graph, const Field& zeta, double T, double dt, const OdeOptions& options) {
    if (&zeta.graph() != &graph) throw std::invalid_argument("initial field lives on a different graph");
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(T >= 0.0)) throw std::invalid_argument("final time must be non-negative");
    for (NodeId x = 0; x < graph.node_count(); ++x) {
        if (graph.is_fixed(x) && zeta.node(x) != 0.0)
            throw std::invalid_argument("initial field must vanish on V1");
    }

    auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    OdeSolution sol;
    sol.dt_ = steps == 0 ? dt : T / static_cast<double>(steps);
    sol.snapshots_.reserve(steps + 1);
    sol.integrals_.reserve(steps + 1);
    sol.snapshots_.push_back(zeta);
    sol.integrals_.emplace_back(static_cast<std::size_t>(graph.node_count()), 0.0);

    const double a = 0.5 * sol.dt_;
    const double a2 = a * a;
    Field rhs(graph), tmp(graph);
    for (std::size_t k = 0; k < steps; ++k) {
        const Field& v = sol.snapshots_.back();
        // (I - a L~) v' = (I + a L~) v  <=>  (I - a^2 L~^2) v' = (I + a L~)^2 v
        apply_L_masked(v, tmp);
        rhs = v;
        axpy(a, tmp, rhs);
        apply_L_masked(rhs, tmp);
        axpy(a, tmp, rhs);

        Field next = v;
        auto used = solve_normal(rhs, next, a2, options);
        if (used > sol.max_iterations_used_) sol.max_iterations_used_ = used;

        std::vector<double> integral = sol.integrals_.back();
        auto prev_nodes = v.nodes();
        auto next_nodes = next.nodes();
        for (std::size_t x = 0; x < integral.size(); ++x) {
            integral[x] += 0.5 * sol.dt_ * (prev_nodes[x] + next_nodes[x]);
        }
        sol.snapshots_.push_back(std::move(next));
        sol.integrals_.push_back(std::move(integral));
    }
    return sol;
}

std::size_t OdeSolution::grid_index(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
    double k = std::round(t / dt_);
    if (std::abs(k * dt_ - t) > 1e-9 * std::max(1.0, t))
        throw std::invalid_argument("time " + std::to_string(t) + " is not on the solver grid");
    if (k > static_cast<double>(steps()))
        throw std::invalid_argument("time " + std::to_string(t) + " is beyond the solved horizon");
    return static_cast<std::size_t>(k);
}

double OdeSolution::node_integral(NodeId x, double t) const {
    return integrals_[grid_index(t)].at(static_cast<std::size_t>(x));
}

double reconstruct_u(std::span<const double> phi, const OdeSolution& sol, NodeId x, double t) {
    const Graph& g = sol.initial().graph();
    if (x < 0 || x >= g.node_count()) throw std::invalid_argument("unknown node");
    return phi[static_cast<std::size_t>(x)] + g.inv_mass(x) * sol.node_integral(x, t);
}

void write_solution_csv(std::ostream& os, const Graph& graph, const OdeSolution& sol, std::size_t every) {
    if (every == 0) every = 1;
    os << "t,kind,id,value\n";
    char buf[64];
    for (std::size_t k = 0; k <= sol.steps(); ++k) {
        if (k % every != 0 && k != sol.steps()) continue;
        const Field& f = sol.snapshot(k);
        std::snprintf(buf, sizeof buf, "%.17g", sol.time(k));
        const std::string t = buf;
        for (NodeId x = 0; x < graph.node_count(); ++x) {
            std::snprintf(buf, sizeof buf, "%.17g", f.node(x));
            os << t << ",node," << graph.name(x) << ',' << buf << '\n';
        }
        for (EdgeId e = 0; e < graph.edge_count(); ++e) {
            std::snprintf(buf, sizeof buf, "%.17g", f.edge(e));
            os << t << ",edge," << graph.name(graph.tail(e)) << '-' << graph.name(graph.head(e)) << ','
               << buf << '\n';
        }
    }
}

}  // namespace wavegraph
