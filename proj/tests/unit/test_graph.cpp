#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include "doctest.h"
#include "support/random_graph.hpp"
#include "wavegraph/field.hpp"
#include "wavegraph/graph.hpp"
#include "wavegraph/graph_io.hpp"
#include "wavegraph/lattice.hpp"
#include "wavegraph/particle_state.hpp"

using namespace wavegraph;

namespace {

GraphSpec two_node_spec() {
    GraphSpec s;
    s.nodes = {{"a", 1.0, {0.0}, Boundary::free}, {"b", 1.0, {1.0}, Boundary::free}};
    s.edges = {{"a", "b", 1.0}};
    return s;
}

Field ring_cosine(const Graph& ring) {
    const auto n = *ring.ring_size();
    Field g(ring);
    for (std::int64_t k = 0; k < n; ++k) g.node(k) = std::cos(2.0 * std::numbers::pi * k / n);
    return g;
}

double lambda_n(std::int64_t n) { return 2.0 * n * n * (1.0 - std::cos(2.0 * std::numbers::pi / n)); }

}  // namespace

TEST_CASE("build_graph: two-node graph constants and orientation") {
    Graph g = build_graph(two_node_spec());
    CHECK(g.node_count() == 2);
    CHECK(g.edge_count() == 1);
    CHECK(g.tail(0) == g.node("a"));
    CHECK(g.head(0) == g.node("b"));
    CHECK(g.unit_vector(0) == std::vector<double>{1.0});
    CHECK(g.constants().M == 1.0);
    CHECK(g.constants().d == 2.0);
    CHECK(g.constants().max_degree == 1);
    // A = 2 M d sqrt((|V|+|E|) M) = 4 sqrt(3)
    CHECK(*g.constants().A == doctest::Approx(4.0 * std::sqrt(3.0)));
}

TEST_CASE("build_graph: validation errors") {
    auto spec = two_node_spec();
    SUBCASE("self edge") {
        spec.edges.push_back({"a", "a", 1.0});
        CHECK_THROWS_WITH_AS(build_graph(spec), doctest::Contains("self-edge"), std::invalid_argument);
    }
    SUBCASE("duplicate edge in either orientation") {
        spec.edges.push_back({"b", "a", 2.0});
        CHECK_THROWS_WITH_AS(build_graph(spec), doctest::Contains("duplicate edge"), std::invalid_argument);
    }
    SUBCASE("non-positive mass") {
        spec.nodes[0].mass = 0.0;
        CHECK_THROWS_AS(build_graph(spec), std::invalid_argument);
    }
    SUBCASE("non-positive weight") {
        spec.edges[0].weight = -1.0;
        CHECK_THROWS_AS(build_graph(spec), std::invalid_argument);
    }
    SUBCASE("unknown node") {
        spec.edges.push_back({"a", "c", 1.0});
        CHECK_THROWS_WITH_AS(build_graph(spec), doctest::Contains("unknown node"), std::invalid_argument);
    }
}

TEST_CASE("graph spec JSON round trip") {
    auto doc = nlohmann::json::parse(R"({
        "nodes": [{"id": "a", "mass": 2, "coord": [0, 0]}, {"id": 7, "mass": 1, "coord": [1, 0], "boundary": "V1"}],
        "edges": [{"tail": "a", "head": 7, "weight": 3}]
    })");
    Graph g = build_graph(parse_graph_spec(doc));
    CHECK(g.mass(g.node("a")) == 2.0);
    CHECK(g.is_fixed(g.node("7")));
    CHECK(g.weight(0) == 3.0);
    Graph h = build_graph(parse_graph_spec(to_json(parse_graph_spec(doc))));
    CHECK(h.constants().M == g.constants().M);
    CHECK_THROWS_AS(parse_graph_spec(nlohmann::json::parse(R"({"nodes":[{"id":"a","boundary":"V2"}]})")),
                    std::invalid_argument);
}

TEST_CASE("ring_graph: structure") {
    SUBCASE("n = 2 would duplicate a node pair") {
        // oracle: enumerate the unordered pairs {k, k+1 mod n}
        std::set<std::pair<int, int>> pairs;
        int dup = 0;
        for (int k = 0; k < 2; ++k) {
            std::pair<int, int> p{std::min(k, (k + 1) % 2), std::max(k, (k + 1) % 2)};
            dup += pairs.insert(p).second ? 0 : 1;
        }
        CHECK(dup == 1);
        CHECK_THROWS_WITH_AS(ring_graph(2), "ring requires n ≥ 3", std::invalid_argument);
        CHECK_THROWS_AS(ring_graph(1), std::invalid_argument);
    }
    SUBCASE("n = 3") {
        Graph g = ring_graph(3);
        CHECK(g.edge_count() == 3);
        double mass = 0, k = 0;
        for (NodeId x = 0; x < 3; ++x) mass += g.mass(x);
        for (EdgeId e = 0; e < 3; ++e) k += g.weight(e);
        CHECK(mass == doctest::Approx(1.0));
        CHECK(k == 9.0);
    }
    SUBCASE("n = 4 constants") {
        Graph g = ring_graph(4);
        CHECK(g.node_count() == 4);
        CHECK(g.edge_count() == 4);
        CHECK(g.mass(0) == 0.25);
        CHECK(g.weight(2) == 4.0);
        CHECK(g.constants().M == 4.0);
        CHECK(g.constants().d == 2.0);
    }
    SUBCASE("n = 64 coordinates and wrap-around orientation") {
        Graph g = ring_graph(64);
        for (NodeId k = 0; k < 64; ++k) CHECK(g.coord(k)[0] == static_cast<double>(k) / 64.0);
        CHECK(g.tail(63) == 63);
        CHECK(g.head(63) == 0);
        CHECK(g.unit_vector(63) == std::vector<double>{1.0});
    }
}

TEST_CASE("lattice_graph: adjacency and constants") {
    LatticeGraph z1 = lattice_graph(1, 1.0, 1.0);
    std::vector<std::int64_t> origin{0};
    NodeId o = z1.node_id(origin);
    std::set<std::int64_t> nb;
    for (NodeId y : z1.neighbors(o)) nb.insert(z1.coordinates(y)[0]);
    CHECK(nb == std::set<std::int64_t>{-1, 1});

    LatticeGraph z2 = lattice_graph(2, 0.5, 3.0);
    CHECK(z2.constants().max_degree == 4);
    CHECK(z2.constants().d == 4.0);
    CHECK(z2.constants().M == 3.0);
    CHECK_FALSE(z2.constants().A.has_value());
    std::vector<std::int64_t> c{5, -7};
    NodeId x = z2.node_id(c);
    CHECK(z2.coordinates(x) == c);
    CHECK(z2.degree(x) == 4);
    // canonical orientation: from the smaller coordinate to the larger one
    int outgoing = 0;
    z2.for_each_incident(x, [&](const Incidence& inc) {
        auto t = z2.coordinates(z2.tail(inc.edge));
        auto h = z2.coordinates(z2.head(inc.edge));
        CHECK(t < h);
        outgoing += inc.outgoing ? 1 : 0;
        CHECK((inc.outgoing ? z2.tail(inc.edge) : z2.head(inc.edge)) == x);
    });
    CHECK(outgoing == 2);
    CHECK_THROWS_AS(lattice_graph(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(lattice_graph(2, 0, 1), std::invalid_argument);
}

TEST_CASE("norm_alpha") {
    Graph g = build_graph(two_node_spec());
    Field delta(g);
    delta.node(g.node("a")) = 1.0;
    CHECK(norm_alpha(delta, 1) == 1.0);
    CHECK(norm_alpha(delta, 2) == 1.0);
    CHECK(norm_alpha(delta, std::numeric_limits<double>::infinity()) == 1.0);
    CHECK_THROWS_AS(norm_alpha(delta, 0.5), std::invalid_argument);

    Graph ring = ring_graph(4);
    Field ones(ring);
    for (auto& v : ones.nodes()) v = 1.0;
    CHECK(norm_alpha(ones, 1) == 16.0);

    // sup norm is unweighted
    Field big(ring);
    big.edge(1) = -3.0;
    CHECK(norm_alpha(big, std::numeric_limits<double>::infinity()) == 3.0);
}

TEST_CASE("Hölder-type bound on random integer fields") {
    Rng rng = replica_rng(11, 0);
    for (int trial = 0; trial < 100; ++trial) {
        Graph g = build_graph(testing::random_graph_spec(rng, 30, false));
        ParticleState<Graph> f(g);
        for (NodeId x = 0; x < g.node_count(); ++x) f.set_node(x, testing::uniform_int(rng, -6, 6));
        for (EdgeId e = 0; e < g.edge_count(); ++e) f.set_edge(e, testing::uniform_int(rng, -6, 6));
        const double l1 = norm_alpha(f, 1);
        const double linf = norm_alpha(f, std::numeric_limits<double>::infinity());
        for (double alpha : {1.5, 2.0, 3.0}) {
            double lhs = std::pow(norm_alpha(f, alpha), alpha);
            CHECK(lhs <= l1 * std::pow(linf, alpha - 1.0) * (1 + 1e-12));
        }
        CHECK(norm_alpha(f, 1) == doctest::Approx(f.total_rate()).epsilon(1e-12));
    }
}

TEST_CASE("inner_product") {
    Graph g = build_graph(two_node_spec());
    Field da(g), db(g);
    da.node(0) = 1.0;
    db.node(1) = 1.0;
    CHECK(inner_product(da, db) == 0.0);

    Graph ring = ring_graph(4);
    Field g4 = ring_cosine(ring);
    CHECK(inner_product(g4, g4) == doctest::Approx(8.0).epsilon(1e-14));

    Rng rng = replica_rng(5, 0);
    Graph rg = build_graph(testing::random_graph_spec(rng, 40, true));
    for (int i = 0; i < 20; ++i) {
        Field f = testing::random_field(rg, rng);
        double n2 = norm_alpha(f, 2);
        CHECK(std::abs(n2 * n2 - inner_product(f, f)) <= 1e-12 * inner_product(f, f));
    }
    Field other(ring);
    CHECK_THROWS_AS(inner_product(da, other), std::invalid_argument);
}

TEST_CASE("apply_L examples") {
    Graph g = build_graph(two_node_spec());
    Field zero(g);
    Field lz = apply_L(zero);
    CHECK(norm_alpha(lz, 1) == 0.0);

    Field f(g);
    f.node(g.node("a")) = 1.0;
    Field lf = apply_L(f);
    CHECK(lf.edge(0) == -1.0);
    CHECK(lf.node(0) == 0.0);
    CHECK(lf.node(1) == 0.0);

    Graph ring = ring_graph(4);
    Field g4 = ring_cosine(ring);
    Field l2 = apply_L(apply_L(g4));
    CHECK(lambda_n(4) == doctest::Approx(32.0));
    for (NodeId k = 0; k < 4; ++k) CHECK(l2.node(k) == doctest::Approx(-32.0 * g4.node(k)));
}

TEST_CASE("apply_L2_vertex examples") {
    Graph g = build_graph(two_node_spec());
    Field f(g);
    f.node(0) = 1.0;
    auto l2 = apply_L2_vertex(f);
    CHECK(l2[0] == -1.0);
    CHECK(l2[1] == 1.0);

    Graph ring = ring_graph(16);
    Field c(ring);
    for (auto& v : c.nodes()) v = 2.5;
    for (double v : apply_L2_vertex(c)) CHECK(v == 0.0);

    Graph r8 = ring_graph(8);
    Field g8 = ring_cosine(r8);
    auto e8 = apply_L2_vertex(g8);
    const double lam = 128.0 * (1.0 - std::cos(std::numbers::pi / 4.0));
    CHECK(lambda_n(8) == doctest::Approx(lam));
    for (NodeId k = 0; k < 8; ++k) CHECK(e8[static_cast<std::size_t>(k)] == doctest::Approx(-lam * g8.node(k)));
}

TEST_CASE("operator identities on random graphs") {
    Rng rng = replica_rng(2024, 0);
    for (int trial = 0; trial < 50; ++trial) {
        Graph g = build_graph(testing::random_graph_spec(rng, 50, trial % 2 == 0));
        Field f = testing::random_field(g, rng);
        Field h = testing::random_field(g, rng);
        Field lf = apply_L(f);
        Field lh = apply_L(h);
        const double scale = norm_alpha(f, 2) * norm_alpha(lh, 2) + norm_alpha(lf, 2) * norm_alpha(h, 2);
        CHECK(std::abs(inner_product(f, lh) + inner_product(lf, h)) <= 1e-12 * scale);
        CHECK(std::abs(inner_product(f, lf)) <= 1e-12 * norm_alpha(f, 2) * norm_alpha(lf, 2));

        auto direct = apply_L2_vertex(f);
        Field twice = apply_L(lf);
        for (NodeId x = 0; x < g.node_count(); ++x) {
            double a = direct[static_cast<std::size_t>(x)];
            double b = twice.node(x);
            CHECK(std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}));
        }

        // the masked operator stays skew-adjoint on fields vanishing on V1
        Field fm = f, hm = h;
        for (NodeId x = 0; x < g.node_count(); ++x) {
            if (g.is_fixed(x)) fm.node(x) = hm.node(x) = 0.0;
        }
        Field lfm(g), lhm(g);
        apply_L_masked(fm, lfm);
        apply_L_masked(hm, lhm);
        const double mscale = norm_alpha(fm, 2) * norm_alpha(lhm, 2) + norm_alpha(lfm, 2) * norm_alpha(hm, 2);
        CHECK(std::abs(inner_product(fm, lhm) + inner_product(lfm, hm)) <= 1e-12 * std::max(mscale, 1e-300));
    }
}

TEST_CASE("ring eigen-relation L^2 g_n = -lambda_n g_n") {
    for (std::int64_t n : {4, 8, 16, 64}) {
        Graph ring = ring_graph(n);
        Field gn = ring_cosine(ring);
        auto l2 = apply_L2_vertex(gn);
        const double lam = lambda_n(n);
        for (NodeId k = 0; k < n; ++k) {
            double expect = -lam * gn.node(k);
            CHECK(std::abs(l2[static_cast<std::size_t>(k)] - expect) <= 1e-10 * lam);
        }
    }
}
