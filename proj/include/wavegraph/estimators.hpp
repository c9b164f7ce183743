#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "wavegraph/field.hpp"
#include "wavegraph/graph.hpp"
#include "wavegraph/particle_state.hpp"
#include "wavegraph/replicas.hpp"

namespace wavegraph {

struct FeynmanKacResult {
    std::map<NodeId, McEstimate> values;  // u(x, t) per target node
    /// ||zeta - floor(zeta)||_2; nonzero when the data had to be floored.
    double rounding_residual = 0.0;
};

/// u(x, t) = phi(x) + (1/m_x) E int_0^t f_s(x) ds with f_0 = floor(zeta(phi, psi)).
FeynmanKacResult feynman_kac(const Graph& graph, std::span<const double> phi, std::span<const double> psi,
                             std::span<const NodeId> targets, double t, const ReplicaPlan& plan);

struct MeanFieldSample {
    double t;
    Field mean;
    Field std_error;
};

/// Replica mean of f_t at each of the (sorted) sample times.
std::vector<MeanFieldSample> mean_field(const ParticleState<Graph>& f0, std::span<const double> times,
                                        const ReplicaPlan& plan);

struct OdeReference {
    double dt = 1e-3;
};

/// V(t) = E||f_t||_2^2 - ||fbar_t||_2^2 with fbar_t from the ODE solver, one
/// estimate per sample time from a shared set of replicas.
std::vector<McEstimate> fluctuation(const ParticleState<Graph>& f0, std::span<const double> times,
                                    const ReplicaPlan& plan, OdeReference ode = {});
McEstimate fluctuation(const ParticleState<Graph>& f0, double t, const ReplicaPlan& plan, OdeReference ode = {});

/// The exact drift of ||f||_2^2 in state f:
/// sum_x |f(x)|/m_x sum_{y~x} k_xy + sum_<x,y> k_xy (1_V0(x)/m_x + 1_V0(y)/m_y) |f(<x,y>)|.
double energy_rate(const ParticleState<Graph>& f);

struct EnergyRateCheck {
    McEstimate lhs;  // central difference of E||f_t||_2^2 over [t - h, t + h]
    McEstimate rhs;  // E energy_rate(f_t)
};

EnergyRateCheck energy_rate_check(const ParticleState<Graph>& f0, double t, double dt_fd, const ReplicaPlan& plan);

/// E||f_t^N / N - g_t||_2^2 for f_0^N = floor(N zeta) coordinatewise, g_t the ODE solution from zeta.
McEstimate lln_error(const Field& zeta, std::int64_t N, double t, const ReplicaPlan& plan, OdeReference ode = {});

/// M d t ||f||_1 + (||f||_1 + M d) e^{M d t}.
template <class G>
double lln_bound(const ParticleState<G>& f, double t) {
    const double Md = f.graph().constants().Md();
    const double l1 = norm_alpha(f, 1.0);
    return Md * t * l1 + (l1 + Md) * std::exp(Md * t);
}

/// ||f||_2^2 (e^{A t / ||f||_2} - 1); zero for the zero state, which never moves.
double finite_bound(const ParticleState<Graph>& f, double t, double A);
double finite_bound(const ParticleState<Graph>& f, double t);

void require_free_on_boundary(const ParticleState<Graph>& f0);

}  // namespace wavegraph
