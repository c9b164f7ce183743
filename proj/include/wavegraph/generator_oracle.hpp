#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wavegraph/graph.hpp"
#include "wavegraph/particle_state.hpp"

namespace wavegraph {

class StateExplosionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense coordinates of a state on a finite graph: nodes first, then edges.
using Configuration = std::vector<std::int64_t>;

/// Transitions out of `state`, each as (rate, target).
std::vector<std::pair<double, Configuration>> transitions(const Graph& graph, const Configuration& state);

/// A real function of the state with a bound on its absolute value after k
/// jumps from the initial state; the bound must be nondecreasing in k.
struct OracleFunctional {
    std::function<double(const Configuration&)> value;
    std::function<double(std::uint64_t)> envelope;
};

OracleFunctional oracle_node_value(const Graph& graph, const Configuration& f0, NodeId x);
OracleFunctional oracle_edge_value(const Graph& graph, const Configuration& f0, EdgeId e);
OracleFunctional oracle_squared_norm(const Graph& graph, const Configuration& f0);
/// Generator applied to ||.||_2^2, evaluated from the transitions.
OracleFunctional oracle_squared_norm_drift(const Graph& graph, const Configuration& f0);

struct OracleValue {
    double value = 0.0;
    /// Rigorous bound on |value - E G(f_t)|.
    double truncation_bound = 0.0;
};

/// Finite-state truncation of the IPS: every state reachable within J jumps,
/// plus one absorbing overflow state collecting all exits from that set.
class GeneratorOracle {
public:
    GeneratorOracle(const Graph& graph, const ParticleState<Graph>& f0, std::uint64_t jump_cap,
                    std::size_t max_states = 100000);

    std::size_t state_count() const { return states_.size(); }
    const Configuration& state(std::size_t i) const { return states_[i]; }
    std::uint64_t depth(std::size_t i) const { return depth_[i]; }
    std::uint64_t jump_cap() const { return cap_; }
    /// Largest total exit rate over the enumerated states.
    double uniformization_rate() const { return lambda_; }

    /// Off-diagonal entries of row i; target == state_count() is the overflow state.
    struct Entry {
        std::size_t target;
        double rate;
    };
    std::span<const Entry> row(std::size_t i) const;

    /// Transient distribution at time t (last entry: overflow mass).
    std::vector<double> distribution(double t) const;
    /// Poisson tail mass dropped by distribution(t) (upper bound).
    double uniformization_error(double t) const;

    /// P(eta_t > J) bounded through Yule dominance.
    double escape_bound(double t) const;

    std::vector<OracleValue> expectations(double t, std::span<const OracleFunctional> functionals) const;

private:
    double tail_expectation(double t, const std::function<double(std::uint64_t)>& envelope) const;

    const Graph* graph_;
    Configuration initial_;
    std::uint64_t cap_;
    std::vector<Configuration> states_;
    std::vector<std::uint64_t> depth_;
    std::vector<std::size_t> row_start_;
    std::vector<Entry> entries_;
    std::vector<double> exit_rate_;
    double lambda_ = 0.0;
    double l1_0_ = 0.0;
};

Configuration to_configuration(const ParticleState<Graph>& f);

}  // namespace wavegraph
