#include "wavegraph/estimators.hpp"

#include <stdexcept>

#include "wavegraph/simulator.hpp"
#include "wavegraph/wave_ode.hpp"

namespace wavegraph {

namespace {

double squared_norm(const ParticleState<Graph>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.slot_count(); ++i) {
        const double v = static_cast<double>(f.value(i));
        s += f.unit_weight(i) * v * v;
    }
    return s;
}

void check_times(std::span<const double> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw std::invalid_argument("sample times must be non-negative");
        if (i > 0 && times[i] < times[i - 1]) throw std::invalid_argument("sample times must be sorted");
    }
}

double mean_norm_squared(const ParticleState<Graph>& f0, double t, OdeReference ode) {
    if (t == 0.0) return squared_norm(f0);
    Field zeta = to_field(f0);
    auto sol = solve_ibvp(f0.graph(), zeta, t, ode.dt);
    const Field& m = sol.at(t);
    return inner_product(m, m);
}

}  // namespace

void require_free_on_boundary(const ParticleState<Graph>& f0) {
    const Graph& g = f0.graph();
    for (NodeId x = 0; x < g.node_count(); ++x) {
        if (g.is_fixed(x) && f0.node(x) != 0)
            throw std::invalid_argument("initial state must vanish on V1 (node '" + g.name(x) + "')");
    }
}

FeynmanKacResult feynman_kac(const Graph& graph, std::span<const double> phi, std::span<const double> psi,
                             std::span<const NodeId> targets, double t, const ReplicaPlan& plan) {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
    for (NodeId x : targets) {
        if (x < 0 || x >= graph.node_count()) throw std::invalid_argument("unknown target node");
    }
    Field zeta = make_zeta(graph, phi, psi);
    Field floored = zeta;
    for (auto& v : floored.nodes()) v = std::floor(v);
    for (auto& v : floored.edges()) v = std::floor(v);
    FeynmanKacResult result;
    result.rounding_residual = norm_alpha(zeta - floored, 2.0);
    const ParticleState<Graph> f0 = init_state(graph, floored);

    auto table = run_replicas(plan, targets.size(), [&](std::size_t, Rng& rng, std::span<double> row) {
        Trajectory<Graph> traj(f0);
        Observer<Graph> obs;
        for (NodeId x : targets) obs.watch_node(x);
        traj.simulate(t, obs, rng);
        for (std::size_t i = 0; i < targets.size(); ++i) row[i] = obs.integral(i);
    });
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const NodeId x = targets[i];
        McEstimate m = table.column(i, plan.seed);
        m.estimate = phi[static_cast<std::size_t>(x)] + graph.inv_mass(x) * m.estimate;
        m.std_error *= graph.inv_mass(x);
        result.values[x] = m;
    }
    return result;
}

std::vector<MeanFieldSample> mean_field(const ParticleState<Graph>& f0, std::span<const double> times,
                                        const ReplicaPlan& plan) {
    check_times(times);
    const Graph& g = f0.graph();
    const auto nv = static_cast<std::size_t>(g.node_count());
    const auto ne = static_cast<std::size_t>(g.edge_count());
    const std::size_t width = nv + ne;
    const double horizon = times.empty() ? 0.0 : times.back();

    auto table = run_replicas(plan, width * times.size(), [&](std::size_t, Rng& rng, std::span<double> row) {
        Trajectory<Graph> traj(f0);
        Observer<Graph> obs;
        obs.sample_at({times.begin(), times.end()}, [&](std::size_t k, double, const ParticleState<Graph>& s) {
            auto out = row.subspan(k * width, width);
            for (std::size_t x = 0; x < nv; ++x) out[x] = static_cast<double>(s.node(static_cast<NodeId>(x)));
            for (std::size_t e = 0; e < ne; ++e) out[nv + e] = static_cast<double>(s.edge(static_cast<EdgeId>(e)));
        });
        traj.simulate(horizon, obs, rng);
    });

    std::vector<MeanFieldSample> out;
    out.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        MeanFieldSample s{times[k], Field(g), Field(g)};
        for (std::size_t i = 0; i < width; ++i) {
            McEstimate m = table.column(k * width + i, plan.seed);
            if (i < nv) {
                s.mean.node(static_cast<NodeId>(i)) = m.estimate;
                s.std_error.node(static_cast<NodeId>(i)) = m.std_error;
            } else {
                s.mean.edge(static_cast<EdgeId>(i - nv)) = m.estimate;
                s.std_error.edge(static_cast<EdgeId>(i - nv)) = m.std_error;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<McEstimate> fluctuation(const ParticleState<Graph>& f0, std::span<const double> times,
                                    const ReplicaPlan& plan, OdeReference ode) {
    require_free_on_boundary(f0);
    check_times(times);
    const double horizon = times.empty() ? 0.0 : times.back();
    auto table = run_replicas(plan, times.size(), [&](std::size_t, Rng& rng, std::span<double> row) {
        Trajectory<Graph> traj(f0);
        Observer<Graph> obs;
        obs.sample_at({times.begin(), times.end()},
                      [&](std::size_t k, double, const ParticleState<Graph>& s) { row[k] = squared_norm(s); });
        traj.simulate(horizon, obs, rng);
    });
    std::vector<McEstimate> out;
    for (std::size_t k = 0; k < times.size(); ++k) {
        McEstimate m = table.column(k, plan.seed);
        m.estimate -= mean_norm_squared(f0, times[k], ode);
        out.push_back(m);
    }
    return out;
}

McEstimate fluctuation(const ParticleState<Graph>& f0, double t, const ReplicaPlan& plan, OdeReference ode) {
    const double times[] = {t};
    return fluctuation(f0, times, plan, ode).front();
}

double energy_rate(const ParticleState<Graph>& f) {
    const Graph& g = f.graph();
    double s = 0.0;
    for (NodeId x = 0; x < g.node_count(); ++x) {
        const auto v = f.node(x);
        if (v == 0) continue;
        double k = 0.0;
        g.for_each_incident(x, [&](const Incidence& inc) { k += g.weight(inc.edge); });
        s += std::abs(static_cast<double>(v)) * g.inv_mass(x) * k;
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto c = f.edge(e);
        if (c == 0) continue;
        const NodeId x = g.tail(e), y = g.head(e);
        const double w = (g.is_fixed(x) ? 0.0 : g.inv_mass(x)) + (g.is_fixed(y) ? 0.0 : g.inv_mass(y));
        s += g.weight(e) * w * std::abs(static_cast<double>(c));
    }
    return s;
}

EnergyRateCheck energy_rate_check(const ParticleState<Graph>& f0, double t, double dt_fd, const ReplicaPlan& plan) {
    require_free_on_boundary(f0);
    if (!(dt_fd > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    if (t - dt_fd < 0.0) throw std::invalid_argument("finite-difference window starts before t = 0");
    auto table = run_replicas(plan, 2, [&](std::size_t, Rng& rng, std::span<double> row) {
        Trajectory<Graph> traj(f0);
        double before = 0.0;
        Observer<Graph> obs;
        obs.sample_at({t - dt_fd, t, t + dt_fd}, [&](std::size_t k, double, const ParticleState<Graph>& s) {
            if (k == 0) before = squared_norm(s);
            if (k == 1) row[1] = energy_rate(s);
            if (k == 2) row[0] = (squared_norm(s) - before) / (2.0 * dt_fd);
        });
        traj.simulate(t + dt_fd, obs, rng);
    });
    return {table.column(0, plan.seed), table.column(1, plan.seed)};
}

McEstimate lln_error(const Field& zeta, std::int64_t N, double t, const ReplicaPlan& plan, OdeReference ode) {
    if (N < 1) throw std::invalid_argument("scaling N must be at least 1");
    const Graph& g = zeta.graph();
    const double Nd = static_cast<double>(N);
    Field scaled = zeta;
    for (auto& v : scaled.nodes()) v = std::floor(Nd * v);
    for (auto& v : scaled.edges()) v = std::floor(Nd * v);
    const ParticleState<Graph> f0 = init_state(g, scaled);
    require_free_on_boundary(f0);
    auto sol = solve_ibvp(g, zeta, t, ode.dt);
    const Field& target = sol.at(t);

    auto table = run_replicas(plan, 1, [&](std::size_t, Rng& rng, std::span<double> row) {
        Trajectory<Graph> traj(f0);
        traj.simulate(t, rng);
        const auto& s = traj.state();
        double acc = 0.0;
        for (NodeId x = 0; x < g.node_count(); ++x) {
            const double d = static_cast<double>(s.node(x)) / Nd - target.node(x);
            acc += d * d * g.inv_mass(x);
        }
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            const double d = static_cast<double>(s.edge(e)) / Nd - target.edge(e);
            acc += d * d * g.weight(e);
        }
        row[0] = acc;
    });
    return table.column(0, plan.seed);
}

double finite_bound(const ParticleState<Graph>& f, double t, double A) {
    const double n2 = norm_alpha(f, 2.0);
    if (n2 == 0.0) return 0.0;
    return n2 * n2 * std::expm1(A * t / n2);
}

double finite_bound(const ParticleState<Graph>& f, double t) {
    const auto& A = f.graph().constants().A;
    if (!A) throw std::invalid_argument("finite-graph bound needs a finite graph");
    return finite_bound(f, t, *A);
}

}  // namespace wavegraph
