#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "wavegraph/estimators.hpp"
#include "wavegraph/generator_oracle.hpp"
#include "wavegraph/hydro.hpp"
#include "wavegraph/hydro_error.hpp"
#include "wavegraph/simulator.hpp"
#include "wavegraph/wave_ode.hpp"

using namespace wavegraph;

namespace {

Graph two_node() {
    GraphSpec s;
    s.nodes = {{"a", 1.0, {0.0}, Boundary::free}, {"b", 1.0, {1.0}, Boundary::free}};
    s.edges = {{"a", "b", 1.0}};
    return build_graph(s);
}

PeriodicData sine_psi() {
    PeriodicData d;
    d.psi = FourierSeries({{1, 0.0, 1.0}});
    return d;
}

bool within(const McEstimate& m, double target, double sigmas, double slack = 0.0) {
    return std::abs(m.estimate - target) <= sigmas * m.std_error + slack;
}

}  // namespace

TEST_CASE("replica reduction") {
    std::vector<double> xs(1001);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 0.1 * static_cast<double>(i);
    CHECK(pairwise_sum(xs) == doctest::Approx(0.1 * 1000 * 1001 / 2));
    auto m = summarize(xs, 9);
    CHECK(m.estimate == doctest::Approx(50.0));
    CHECK(m.replicas == 1001);
    CHECK(m.seed == 9);
    // population of 0.1 * uniform integers 0..1000: sample variance = 0.01 * 1001 * 1002 / 12
    CHECK(m.std_error == doctest::Approx(std::sqrt(0.01 * 1001.0 * 1002.0 / 12.0 / 1001.0)));

    ReplicaPlan plan{.replicas = 1, .seed = 3};
    CHECK_THROWS_AS(run_replicas(plan, 1, [](std::size_t, Rng&, std::span<double>) {}), std::invalid_argument);

    Graph g = two_node();
    auto f0 = init_state(g, {{0, 1.0}}, {});
    auto run = [&](unsigned threads) {
        ReplicaPlan p{.replicas = 64, .seed = 17, .threads = threads};
        return fluctuation(f0, 0.5, p);
    };
    auto one = run(1), four = run(4);
    CHECK(one.estimate == four.estimate);
    CHECK(one.std_error == four.std_error);

    ReplicaPlan failing{.replicas = 8, .seed = 1, .threads = 3};
    CHECK_THROWS_AS(run_replicas(failing, 1,
                                 [](std::size_t r, Rng&, std::span<double>) {
                                     if (r == 5) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("feynman_kac") {
    Graph g = two_node();
    std::vector<double> phi{1.0, 0.0}, psi{0.0, 0.0};
    const NodeId targets[] = {0, 1};
    SUBCASE("t = 0 returns phi exactly") {
        auto r = feynman_kac(g, phi, psi, targets, 0.0, {.replicas = 10, .seed = 1});
        CHECK(r.values.at(0).estimate == 1.0);
        CHECK(r.values.at(0).std_error == 0.0);
        CHECK(r.values.at(1).estimate == 0.0);
    }
    SUBCASE("zero data stays at phi") {
        std::vector<double> flat{2.0, 2.0};
        auto r = feynman_kac(g, flat, psi, targets, 3.0, {.replicas = 10, .seed = 1});
        CHECK(r.values.at(1).estimate == 2.0);
        CHECK(r.values.at(1).std_error == 0.0);
    }
    SUBCASE("two-node closed form") {
        auto r = feynman_kac(g, phi, psi, targets, 1.0, {.replicas = 10000, .seed = 2024});
        const double exact = 0.5 * (1.0 + std::cos(std::sqrt(2.0)));
        CHECK(within(r.values.at(0), exact, 3.0));
        CHECK(within(r.values.at(1), 1.0 - exact, 3.0));
        CHECK(r.rounding_residual == 0.0);
    }
    SUBCASE("non-integer data is floored and reported") {
        std::vector<double> frac{0.5, 0.0};
        auto r = feynman_kac(g, frac, psi, targets, 0.1, {.replicas = 4, .seed = 1});
        CHECK(r.rounding_residual == doctest::Approx(0.5));
    }
    CHECK_THROWS_AS(feynman_kac(g, phi, psi, targets, 1.0, {.replicas = 1, .seed = 1}), std::invalid_argument);
}

TEST_CASE("mean_field matches the ODE") {
    Graph g = two_node();
    auto f0 = init_state(g, {{0, 1.0}}, {});
    const double times[] = {0.0, 0.5, 1.0};
    auto samples = mean_field(f0, times, {.replicas = 4000, .seed = 5});
    CHECK(samples[0].mean.node(0) == 1.0);
    CHECK(samples[0].std_error.node(0) == 0.0);
    Field zeta = to_field(f0);
    auto sol = solve_ibvp(g, zeta, 1.0, 1e-3);
    for (std::size_t k = 1; k < 3; ++k) {
        const Field& ode = sol.at(times[k]);
        const auto& s = samples[k];
        for (NodeId x = 0; x < 2; ++x) CHECK(std::abs(s.mean.node(x) - ode.node(x)) <= 4 * s.std_error.node(x));
        CHECK(std::abs(s.mean.edge(0) - ode.edge(0)) <= 4 * s.std_error.edge(0));
    }

    GraphSpec spec;
    spec.nodes = {{"a", 1.0, {0.0}, Boundary::free}, {"b", 2.0, {1.0}, Boundary::fixed}};
    spec.edges = {{"a", "b", 1.0}};
    Graph h = build_graph(spec);
    auto s0 = init_state(h, {{0, 2.0}, {1, -3.0}}, {});
    const double t1[] = {0.7};
    auto frozen = mean_field(s0, t1, {.replicas = 50, .seed = 6});
    CHECK(frozen[0].mean.node(1) == -3.0);
    CHECK(frozen[0].std_error.node(1) == 0.0);
}

TEST_CASE("closed-form fluctuation bounds") {
    Graph g = two_node();
    auto zero = init_state(g, {}, {});
    // ||f||_1 = 0: Md e^{Md t}
    CHECK(lln_bound(zero, 0.5) == doctest::Approx(2.0 * std::exp(1.0)));
    CHECK(finite_bound(zero, 0.5) == 0.0);
    auto one = init_state(g, {{0, 1.0}}, {});
    CHECK(lln_bound(one, 1.0) == doctest::Approx(2.0 + 3.0 * std::exp(2.0)));
    CHECK(lln_bound(one, 1.0) == doctest::Approx(24.17).epsilon(1e-3));

    // large ||f||_2: s^2 (e^{At/s} - 1) = A t s (1 + A t/(2 s) + O(s^-2))
    Graph ring = ring_graph(6);
    const double A = *ring.constants().A;
    const double t = 0.3;
    for (std::int64_t scale : {100, 1000, 10000}) {
        auto f = init_state(ring, {{0, static_cast<double>(scale)}}, {});
        const double s = norm_alpha(f, 2.0);
        const double ratio = finite_bound(f, t) / (A * t * s);
        CHECK(std::abs(ratio - 1.0 - A * t / (2.0 * s)) <= std::pow(A * t / s, 2));
    }
    LatticeGraph z1 = lattice_graph(1, 1.0, 1.0);
    auto lat = init_state(z1, {{z1.node_id(std::vector<std::int64_t>{0}), 1.0}}, {});
    CHECK(lln_bound(lat, 1.0) == doctest::Approx(2.0 + 3.0 * std::exp(2.0)));
}

TEST_CASE("fluctuation estimates") {
    Graph g = two_node();
    auto f0 = init_state(g, {{0, 1.0}}, {});
    CHECK(fluctuation(f0, 0.0, {.replicas = 5, .seed = 1}).estimate == doctest::Approx(0.0).epsilon(1e-12));
    const double times[] = {0.25, 0.5, 1.0};
    auto v = fluctuation(f0, times, {.replicas = 20000, .seed = 8});
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(v[k].estimate <= lln_bound(f0, times[k]) + 3 * v[k].std_error);
        CHECK(v[k].estimate <= finite_bound(f0, times[k]) + 3 * v[k].std_error);
        if (k > 0) CHECK(v[k - 1].estimate <= v[k].estimate + 3 * std::hypot(v[k - 1].std_error, v[k].std_error));
    }
    GraphSpec spec;
    spec.nodes = {{"a", 1.0, {0.0}, Boundary::free}, {"b", 1.0, {1.0}, Boundary::fixed}};
    spec.edges = {{"a", "b", 1.0}};
    Graph h = build_graph(spec);
    auto bad = init_state(h, {{1, 1.0}}, {});
    CHECK_THROWS_AS(fluctuation(bad, 0.5, {.replicas = 4, .seed = 1}), std::invalid_argument);
}

TEST_CASE("energy-rate functional") {
    Graph ring = ring_graph(8);
    auto f = hydro_init(ring, 50, sine_psi());
    f.set_edge(3, -7);
    CHECK(energy_rate(f) == doctest::Approx(2.0 * 8 * norm_alpha(f, 1.0)));

    Graph g = two_node();
    auto zero = init_state(g, {}, {});
    auto r = energy_rate_check(zero, 0.2, 0.02, {.replicas = 4, .seed = 1});
    CHECK(r.lhs.estimate == 0.0);
    CHECK(r.rhs.estimate == 0.0);
    CHECK_THROWS_AS(energy_rate_check(zero, 0.01, 0.02, {.replicas = 4, .seed = 1}), std::invalid_argument);

    auto small = hydro_init(ring, 10, sine_psi());
    auto chk = energy_rate_check(small, 0.2, 0.02, {.replicas = 4000, .seed = 3});
    const double allowance = std::pow(2 * std::numbers::pi * 0.02, 2) * std::abs(chk.rhs.estimate);
    CHECK(std::abs(chk.lhs.estimate - chk.rhs.estimate) <=
          4 * std::hypot(chk.lhs.std_error, chk.rhs.std_error) + allowance);
}

TEST_CASE("generator oracle") {
    Graph g = two_node();
    auto f0 = init_state(g, {{0, 1.0}}, {});
    const Configuration c0 = to_configuration(f0);

    SUBCASE("J = 0 is the initial state") {
        GeneratorOracle o(g, f0, 0);
        CHECK(o.state_count() == 1);
        OracleFunctional fns[] = {oracle_node_value(g, c0, 0), oracle_squared_norm(g, c0)};
        auto v = o.expectations(0.0, fns);
        CHECK(v[0].value == 1.0);
        CHECK(v[1].value == 1.0);
        CHECK(v[0].truncation_bound == 0.0);
    }
    SUBCASE("rows are generator rows") {
        GeneratorOracle o(g, f0, 6);
        for (std::size_t i = 0; i < o.state_count(); ++i) {
            double out = 0.0;
            for (const auto& e : o.row(i)) {
                CHECK(e.rate > 0.0);
                CHECK(e.target != i);
                out += e.rate;
            }
            double l1 = 0.0;
            for (std::size_t k = 0; k < 3; ++k) l1 += std::abs(static_cast<double>(o.state(i)[k]));
            CHECK(out == doctest::Approx(l1));  // m = k = 1
            CHECK(o.depth(i) <= 6);
        }
        auto p = o.distribution(0.7);
        double mass = 0.0;
        for (double x : p) mass += x;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.back() <= o.escape_bound(0.7) + 1e-12);
    }
    SUBCASE("first moments equal the ODE") {
        GeneratorOracle o(g, f0, 12);
        OracleFunctional fns[] = {oracle_node_value(g, c0, 0), oracle_node_value(g, c0, 1),
                                  oracle_edge_value(g, c0, 0)};
        auto v = o.expectations(0.3, fns);
        auto sol = solve_ibvp(g, to_field(f0), 0.3, 1e-4);
        const Field& m = sol.at(0.3);
        CHECK(std::abs(v[0].value - m.node(0)) <= 1e-6 + v[0].truncation_bound);
        CHECK(std::abs(v[1].value - m.node(1)) <= 1e-6 + v[1].truncation_bound);
        CHECK(std::abs(v[2].value - m.edge(0)) <= 1e-6 + v[2].truncation_bound);
        CHECK(v[0].truncation_bound < 1e-3);
    }
    SUBCASE("squared-norm drift is the energy-rate functional") {
        GeneratorOracle o(g, f0, 6);
        auto drift = oracle_squared_norm_drift(g, c0);
        for (std::size_t i = 0; i < o.state_count(); ++i) {
            ParticleState<Graph> s(g);
            s.set_node(0, o.state(i)[0]);
            s.set_node(1, o.state(i)[1]);
            s.set_edge(0, o.state(i)[2]);
            CHECK(drift.value(o.state(i)) == doctest::Approx(energy_rate(s)));
        }
        // d/dt E||f_t||^2 from oracle expectations against E energy_rate(f_t)
        GeneratorOracle big(g, f0, 14);
        OracleFunctional sq[] = {oracle_squared_norm(g, c0)};
        OracleFunctional rate[] = {drift};
        const double h = 1e-3, t = 0.3;
        double lhs = (big.expectations(t + h, sq)[0].value - big.expectations(t - h, sq)[0].value) / (2 * h);
        auto rhs = big.expectations(t, rate)[0];
        CHECK(std::abs(lhs - rhs.value) <= 1e-4 + rhs.truncation_bound + 2 * big.expectations(t, sq)[0].truncation_bound / h);
    }
    SUBCASE("distribution matches simulation in total variation") {
        GeneratorOracle o(g, f0, 12);
        auto p = o.distribution(0.3);
        std::map<Configuration, std::size_t> index;
        for (std::size_t i = 0; i < o.state_count(); ++i) index[o.state(i)] = i;
        std::vector<double> counts(o.state_count() + 1, 0.0);
        const int R = 100000;
        for (int r = 0; r < R; ++r) {
            Rng rng = replica_rng(41, static_cast<std::uint64_t>(r));
            Trajectory<Graph> traj(f0);
            traj.simulate(0.3, rng);
            auto it = index.find(to_configuration(traj.state()));
            counts[it == index.end() ? o.state_count() : it->second] += 1.0;
        }
        double tv = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) tv += std::abs(counts[i] / R - p[i]);
        CHECK(0.5 * tv <= 0.02);
    }
    SUBCASE("state cap") {
        Graph ring = ring_graph(5);
        auto s = init_state(ring, {{0, 3.0}}, {});
        CHECK_THROWS_AS(GeneratorOracle(ring, s, 10, 500), StateExplosionError);
    }
}

TEST_CASE("hydro quadrature and initial error") {
    PeriodicData d;
    d.phi = FourierSeries({{1, 0.0, 1.0}});
    d.psi = FourierSeries({{1, 0.5, 0.0}});
    // constant cells against u_t = psi at t = 0: ||c - psi||^2 = c^2 + 1/8 for c constant
    HydroReference ref(16, d, 0.0);
    std::vector<double> c(16, 0.3);
    CHECK(ref.velocity_error(c) == doctest::Approx(0.09 + 0.125).epsilon(1e-3));
    std::vector<double> zero(16, 0.0);
    CHECK(ref.gradient_error(zero) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi).epsilon(1e-3));

    // left-endpoint sampling of smooth data: Err(0) = O(1/n^2) once N >> n
    double prev = initial_hydro_error(8, 64, d);
    for (std::int64_t n : {16, 32, 64, 128}) {
        double e = initial_hydro_error(n, n * n, d);
        CHECK(e < prev);
        if (n >= 64) CHECK(prev / e == doctest::Approx(4.0).epsilon(0.1));
        prev = e;
    }
    CHECK_THROWS_WITH_AS(initial_hydro_error(2, 10, d), "ring requires n ≥ 3", std::invalid_argument);
}

TEST_CASE("hydro error decomposition") {
    auto r = hydro_error(16, 64, sine_psi(), 0.25, {.replicas = 200, .seed = 12});
    CHECK(r.err.estimate > 0.0);
    CHECK(r.err.estimate == doctest::Approx(r.velocity.estimate + r.gradient.estimate));
    CHECK(std::abs(r.decomposition_residual.estimate) <= 3 * r.decomposition_residual.std_error + 1e-9);
    CHECK(std::abs(r.err.estimate - r.bias - r.scaled_fluctuation.estimate) <=
          3 * r.decomposition_residual.std_error + 1e-9);
    auto t0 = hydro_error(16, 64, sine_psi(), 0.0, {.replicas = 4, .seed = 1});
    CHECK(t0.err.estimate == doctest::Approx(initial_hydro_error(16, 64, sine_psi())));
    CHECK(t0.err.std_error == 0.0);
}

TEST_CASE("weak error") {
    // t = 0 oracle: sum_k eta(k/n) (psi(k/n)/n - int_cell psi) with exact cell integrals
    for (std::int64_t n : {16, 32, 64}) {
        const double nd = static_cast<double>(n);
        double proj = 0.0;
        for (std::int64_t k = 0; k < n; ++k) {
            const double a = k / nd, b = (k + 1) / nd;
            const double cell = (std::cos(2 * std::numbers::pi * a) - std::cos(2 * std::numbers::pi * b)) /
                                (2 * std::numbers::pi);
            proj += std::cos(2 * std::numbers::pi * a) * (std::sin(2 * std::numbers::pi * a) / nd - cell);
        }
        auto t0 = weak_error(n, 1000000, sine_psi(), 0.0, 1, TestFunction::cosine, {.replicas = 4, .seed = 1});
        // flooring shifts every cell by less than 1/N
        CHECK(std::abs(t0.weak.estimate - proj * proj) <= 2.0 * std::abs(proj) * 1e-6 + 1e-9);
        CHECK(t0.weak.estimate <= 3.0 / (nd * nd));
        CHECK(t0.eigen_fluctuation.estimate == doctest::Approx(0.0).epsilon(1e-12));
    }
    auto s = weak_error(16, 32, sine_psi(), 0.25, 1, TestFunction::sine, {.replicas = 100, .seed = 2});
    auto e = hydro_error(16, 32, sine_psi(), 0.25, {.replicas = 100, .seed = 2});
    // Cauchy-Schwarz with ||eta_n||_H <= 1 on the same replicas
    CHECK(s.weak.estimate <= e.velocity.estimate * (1 + 1e-12));
    CHECK_THROWS_AS(weak_error(16, 32, sine_psi(), 0.25, -1, TestFunction::sine, {.replicas = 4, .seed = 2}),
                    std::invalid_argument);
}

TEST_CASE("LLN error scales like 1/N") {
    Graph ring = ring_graph(8);
    Field zeta(ring);
    for (NodeId k = 0; k < 8; ++k) zeta.node(k) = sin_2pi(k / 8.0);
    auto a = lln_error(zeta, 20, 0.5, {.replicas = 400, .seed = 4});
    auto b = lln_error(zeta, 200, 0.5, {.replicas = 400, .seed = 4});
    const double slope = std::log10(b.estimate / a.estimate);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.3));
}
