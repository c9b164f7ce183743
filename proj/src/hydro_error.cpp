#include "wavegraph/hydro_error.hpp"

#include <cmath>
#include <stdexcept>

#include "wavegraph/hydro.hpp"
#include "wavegraph/simulator.hpp"
#include "wavegraph/wave_ode.hpp"

namespace wavegraph {

namespace {

// Gauss-Legendre points of [0, 1]
const double gauss_lo = 0.5 - 0.5 / std::sqrt(3.0);
const double gauss_hi = 0.5 + 0.5 / std::sqrt(3.0);

void check_sizes(std::int64_t n, std::int64_t N) {
    if (n < 3) throw std::invalid_argument("ring requires n ≥ 3");
    if (N < 1) throw std::invalid_argument("particle density N must be at least 1");
}

double ode_step(std::int64_t n, const HydroOptions& o) {
    return o.ode_dt > 0.0 ? o.ode_dt : std::min(1e-3, 0.02 / static_cast<double>(n));
}

double squared_norm(const ParticleState<Graph>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.slot_count(); ++i) {
        const double v = static_cast<double>(f.value(i));
        s += f.unit_weight(i) * v * v;
    }
    return s;
}

struct MeanPath {
    Field mean;
    double norm_squared;
};

MeanPath ode_mean(const Graph& ring, const ParticleState<Graph>& f0, double t, double dt) {
    Field zeta = to_field(f0);
    if (t == 0.0) return {zeta, inner_product(zeta, zeta)};
    auto sol = solve_ibvp(ring, zeta, t, dt);
    Field m = sol.at(t);
    const double n2 = inner_product(m, m);
    return {std::move(m), n2};
}

}  // namespace

HydroFields hydro_fields(const ParticleState<Graph>& state, std::int64_t N, double t) {
    const Graph& g = state.graph();
    if (!g.ring_size()) throw std::invalid_argument("hydrodynamic fields need a ring graph");
    const auto n = *g.ring_size();
    HydroFields h{n, N, t, std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
    const double Nd = static_cast<double>(N);
    for (std::int64_t k = 0; k < n; ++k) {
        h.v[static_cast<std::size_t>(k)] = static_cast<double>(state.node(k)) / Nd;
        h.w[static_cast<std::size_t>(k)] = static_cast<double>(state.edge(k)) / Nd;
    }
    return h;
}

HydroReference::HydroReference(std::int64_t n, const PeriodicData& data, double t) : n_(n), t_(t) {
    if (n < 1) throw std::invalid_argument("need at least one cell");
    ut_.resize(2 * static_cast<std::size_t>(n));
    ux_.resize(2 * static_cast<std::size_t>(n));
    const double h = 1.0 / static_cast<double>(n);
    for (std::int64_t k = 0; k < n; ++k) {
        for (int q = 0; q < 2; ++q) {
            const double x = (static_cast<double>(k) + (q == 0 ? gauss_lo : gauss_hi)) * h;
            WaveSample s = dalembert(data, x, t);
            ut_[2 * static_cast<std::size_t>(k) + q] = s.u_t;
            ux_[2 * static_cast<std::size_t>(k) + q] = s.u_x;
        }
    }
}

double HydroReference::cell_error(const std::vector<double>& c, const std::vector<double>& ref, std::int64_t n) {
    if (static_cast<std::int64_t>(c.size()) != n) throw std::invalid_argument("cell count mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double a = c[k] - ref[2 * k];
        const double b = c[k] - ref[2 * k + 1];
        s += a * a + b * b;
    }
    return 0.5 * s / static_cast<double>(n);
}

double HydroReference::velocity_error(const std::vector<double>& v) const { return cell_error(v, ut_, n_); }
double HydroReference::gradient_error(const std::vector<double>& w) const { return cell_error(w, ux_, n_); }

double HydroReference::velocity_projection(const std::vector<double>& v, const std::vector<double>& eta) const {
    if (static_cast<std::int64_t>(v.size()) != n_ || eta.size() != v.size())
        throw std::invalid_argument("cell count mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += eta[k] * (v[k] - 0.5 * (ut_[2 * k] + ut_[2 * k + 1]));
    return s / static_cast<double>(n_);
}

HydroErrorResult hydro_error(std::int64_t n, std::int64_t N, const PeriodicData& data, double t,
                             const ReplicaPlan& plan, HydroOptions options) {
    check_sizes(n, N);
    if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
    const Graph ring = ring_graph(n);
    const ParticleState<Graph> f0 = hydro_init(ring, N, data);
    const HydroReference ref(n, data, t);
    const MeanPath mean = ode_mean(ring, f0, t, ode_step(n, options));
    const double scale = 1.0 / (static_cast<double>(n) * n * static_cast<double>(N) * N);

    std::vector<double> mv(static_cast<std::size_t>(n)), mw(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        mv[static_cast<std::size_t>(k)] = mean.mean.node(k) / static_cast<double>(N);
        mw[static_cast<std::size_t>(k)] = mean.mean.edge(k) / static_cast<double>(N);
    }
    const double bias = ref.velocity_error(mv) + ref.gradient_error(mw);

    // columns: velocity error, gradient error, ||f_t||_2^2
    auto table = run_replicas(plan, 3, [&](std::size_t, Rng& rng, std::span<double> row) {
        Trajectory<Graph> traj(f0);
        traj.simulate(t, rng);
        HydroFields h = hydro_fields(traj.state(), N, t);
        row[0] = ref.velocity_error(h.v);
        row[1] = ref.gradient_error(h.w);
        row[2] = squared_norm(traj.state());
    });

    HydroErrorResult r;
    r.n = n;
    r.N = N;
    r.t = t;
    r.bias = bias;
    r.err = table.reduce([](std::span<const double> row) { return row[0] + row[1]; }, plan.seed);
    r.velocity = table.column(0, plan.seed);
    r.gradient = table.column(1, plan.seed);
    r.scaled_fluctuation =
        table.reduce([&](std::span<const double> row) { return scale * (row[2] - mean.norm_squared); }, plan.seed);
    r.decomposition_residual = table.reduce(
        [&](std::span<const double> row) { return row[0] + row[1] - bias - scale * (row[2] - mean.norm_squared); },
        plan.seed);
    return r;
}

double initial_hydro_error(std::int64_t n, std::int64_t N, const PeriodicData& data) {
    check_sizes(n, N);
    const Graph ring = ring_graph(n);
    HydroFields h = hydro_fields(hydro_init(ring, N, data), N, 0.0);
    const HydroReference ref(n, data, 0.0);
    return ref.velocity_error(h.v) + ref.gradient_error(h.w);
}

WeakErrorResult weak_error(std::int64_t n, std::int64_t N, const PeriodicData& data, double t,
                           std::int64_t frequency, TestFunction kind, const ReplicaPlan& plan,
                           HydroOptions options) {
    check_sizes(n, N);
    if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
    if (frequency < 0) throw std::invalid_argument("test-function frequency must be non-negative");
    const Graph ring = ring_graph(n);
    const ParticleState<Graph> f0 = hydro_init(ring, N, data);
    const HydroReference ref(n, data, t);
    const MeanPath mean = ode_mean(ring, f0, t, ode_step(n, options));

    const double nd = static_cast<double>(n), Nd = static_cast<double>(N);
    std::vector<double> eta(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        const double x = static_cast<double>(frequency * k) / nd;
        eta[static_cast<std::size_t>(k)] = kind == TestFunction::cosine ? cos_2pi(x) : sin_2pi(x);
    }
    // [fbar_t, g]_G with g = eta on nodes (1/m = n)
    double mean_proj = 0.0;
    for (std::int64_t k = 0; k < n; ++k) mean_proj += nd * mean.mean.node(k) * eta[static_cast<std::size_t>(k)];

    auto table = run_replicas(plan, 2, [&](std::size_t, Rng& rng, std::span<double> row) {
        Trajectory<Graph> traj(f0);
        traj.simulate(t, rng);
        HydroFields h = hydro_fields(traj.state(), N, t);
        const double p = ref.velocity_projection(h.v, eta);
        row[0] = p * p;
        double proj = 0.0;
        for (std::int64_t k = 0; k < n; ++k)
            proj += nd * static_cast<double>(traj.state().node(k)) * eta[static_cast<std::size_t>(k)];
        const double d = (proj - mean_proj) / (nd * nd * Nd);
        row[1] = d * d;
    });

    WeakErrorResult r;
    r.n = n;
    r.N = N;
    r.t = t;
    r.weak = table.column(0, plan.seed);
    r.eigen_fluctuation = table.column(1, plan.seed);
    return r;
}

}  // namespace wavegraph
