#pragma once

#include <cstdint>
#include <vector>

#include "wavegraph/graph.hpp"
#include "wavegraph/particle_state.hpp"
#include "wavegraph/periodic.hpp"
#include "wavegraph/replicas.hpp"

namespace wavegraph {

/// Cell values of the rescaled fields on [0, 1): cell k covers [k/n, (k+1)/n),
/// v_k = f(k)/N and w_k = f(<k, k+1>)/N.
struct HydroFields {
    std::int64_t n = 0;
    std::int64_t N = 0;
    double t = 0.0;
    std::vector<double> v;
    std::vector<double> w;
};

HydroFields hydro_fields(const ParticleState<Graph>& state, std::int64_t N, double t);

/// u_t and u_x of the d'Alembert solution at the two Gauss points of every cell.
class HydroReference {
public:
    HydroReference(std::int64_t n, const PeriodicData& data, double t);

    std::int64_t cells() const { return n_; }
    double time() const { return t_; }

    /// ||v - u_t||_H^2 and ||w - u_x||_H^2 where v, w are piecewise constant.
    double velocity_error(const std::vector<double>& v) const;
    double gradient_error(const std::vector<double>& w) const;
    /// [v - u_t, eta]_H against a piecewise-constant weight eta (cell values).
    double velocity_projection(const std::vector<double>& v, const std::vector<double>& eta) const;

private:
    static double cell_error(const std::vector<double>& c, const std::vector<double>& ref, std::int64_t n);

    std::int64_t n_;
    double t_;
    std::vector<double> ut_;  // 2 per cell
    std::vector<double> ux_;
};

struct HydroOptions {
    double ode_dt = 0.0;  // 0: min(1e-3, 0.02/n)
};

struct HydroErrorResult {
    std::int64_t n = 0;
    std::int64_t N = 0;
    double t = 0.0;
    McEstimate err;       // Err^{n,N}(t)
    McEstimate velocity;  // E||v - u_t||_H^2
    McEstimate gradient;  // E||w - u_x||_H^2
    /// ||E v - u_t||_H^2 + ||E w - u_x||_H^2 with the mean from the ODE.
    double bias = 0.0;
    /// (n^2 N^2)^{-1} (E||f_t||_2^2 - ||fbar_t||_2^2).
    McEstimate scaled_fluctuation;
    /// Per-replica Err - bias - scaled fluctuation; zero in expectation.
    McEstimate decomposition_residual;
};

HydroErrorResult hydro_error(std::int64_t n, std::int64_t N, const PeriodicData& data, double t,
                             const ReplicaPlan& plan, HydroOptions options = {});

/// Deterministic Err^{n,N}(0) of the floored initial data.
double initial_hydro_error(std::int64_t n, std::int64_t N, const PeriodicData& data);

enum class TestFunction { cosine, sine };

struct WeakErrorResult {
    std::int64_t n = 0;
    std::int64_t N = 0;
    double t = 0.0;
    McEstimate weak;  // E [v - u_t, eta_n]_H^2, eta_n(x) = eta(floor(n x)/n)
    /// (n^4 N^2)^{-1} E [f_t - fbar_t, g]^2 with g(k) = eta(k/n) on nodes, zero on edges.
    McEstimate eigen_fluctuation;
};

WeakErrorResult weak_error(std::int64_t n, std::int64_t N, const PeriodicData& data, double t,
                           std::int64_t frequency, TestFunction kind, const ReplicaPlan& plan,
                           HydroOptions options = {});

}  // namespace wavegraph
