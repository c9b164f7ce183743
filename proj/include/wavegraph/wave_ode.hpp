#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "wavegraph/field.hpp"
#include "wavegraph/graph.hpp"

namespace wavegraph {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Initial data of the first-order system: zeta(x) = m_x psi(x),
/// zeta(<x,y>) = phi(y) - phi(x). Throws if psi is nonzero on V1.
Field make_zeta(const Graph& graph, std::span<const double> phi, std::span<const double> psi);

struct OdeOptions {
    double tolerance = 1e-12;        // relative residual of each linear solve
    std::int64_t max_iterations = 10000;
};

/// Time-stepped solution of dv/dt = L~ v, v(0) = zeta, v = 0 on V1, by the
/// implicit midpoint rule. Every grid snapshot is kept together with the
/// running trapezoid integral of the node values.
class OdeSolution {
public:
    double dt() const { return dt_; }
    double final_time() const { return dt_ * static_cast<double>(snapshots_.size() - 1); }
    std::size_t steps() const { return snapshots_.size() - 1; }
    double time(std::size_t k) const { return dt_ * static_cast<double>(k); }

    const Field& snapshot(std::size_t k) const { return snapshots_.at(k); }
    /// Snapshot at a grid time; throws when t is off the grid or beyond T.
    const Field& at(double t) const { return snapshots_[grid_index(t)]; }
    /// int_0^t v(x, s) ds by the trapezoid rule on the grid.
    double node_integral(NodeId x, double t) const;

    const Field& initial() const { return snapshots_.front(); }
    std::size_t grid_index(double t) const;
    std::int64_t max_iterations_used() const { return max_iterations_used_; }

private:
    friend OdeSolution solve_ibvp(const Graph&, const Field&, double, double, const OdeOptions&);
    double dt_ = 0.0;
    std::vector<Field> snapshots_;
    std::vector<std::vector<double>> integrals_;
    std::int64_t max_iterations_used_ = 0;
};

/// Integrates to time T with a uniform step no larger than dt (the step is
/// shrunk so that T is a grid point).
OdeSolution solve_ibvp(const Graph& graph, const Field& zeta, double T, double dt,
                       const OdeOptions& options = {});

/// u(x, t) = phi(x) + (1/m_x) int_0^t v(x, s) ds.
double reconstruct_u(std::span<const double> phi, const OdeSolution& sol, NodeId x, double t);

/// CSV with columns `t,kind,id,value`, one row per node and edge per written step.
void write_solution_csv(std::ostream& os, const Graph& graph, const OdeSolution& sol, std::size_t every = 1);

}  // namespace wavegraph
