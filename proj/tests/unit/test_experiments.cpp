#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "experiments.hpp"

using namespace wavegraph::cli;
using nlohmann::json;

namespace {

const std::filesystem::path configs = WAVEGRAPH_SOURCE_DIR "/configs";

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

TEST_CASE("canonical experiment names") {
    CHECK(canonical_kind("feynman-kac") == "fk");
    CHECK(canonical_kind("mean-field-check") == "meanfield");
    CHECK(canonical_kind("energy-rate") == "rate");
    CHECK(canonical_kind("oracle") == "oracle");
    CHECK(experiment_kinds().size() == 9);
    CHECK_THROWS_AS(canonical_kind("plot"), ConfigError);
}

TEST_CASE("overrides") {
    json c{{"seed", 1}, {"graph", {{"ring", 8}}}};
    apply_override(c, "seed=42");
    apply_override(c, "graph.ring=16");
    apply_override(c, "initial.N=50");
    apply_override(c, "output=out/x.csv");
    apply_override(c, "times=[0.1,0.2]");
    CHECK(c["seed"] == 42);
    CHECK(c["graph"]["ring"] == 16);
    CHECK(c["initial"]["N"] == 50);
    CHECK(c["output"] == "out/x.csv");
    CHECK(c["times"].size() == 2);
    CHECK_THROWS_AS(apply_override(c, "novalue"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "seed.x=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "a..b=1"), ConfigError);
}

TEST_CASE("config hash ignores threads and output only") {
    json a{{"seed", 3}, {"replicas", 10}, {"threads", 1}, {"output", "a.csv"}};
    json b = a;
    b["threads"] = 8;
    b["output"] = "b.csv";
    CHECK(config_hash(a) == config_hash(b));
    b["replicas"] = 11;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(hash_string(0xabcULL) == "0000000000000abc");
    // FNV-1a of the empty object dump "{}"
    std::uint64_t x = 14695981039346656037ull;
    for (unsigned char c : std::string("{}")) {
        x ^= c;
        x *= 1099511628211ull;
    }
    CHECK(config_hash(json::object()) == x);
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(run_experiment("fk", json::array()), ConfigError);
    json no_seed{{"graph", "two_node.json"}, {"phi", {{"a", 1}}}};
    CHECK_THROWS_AS(run_experiment("fk", no_seed, configs), ConfigError);
    json missing{{"graph", "does_not_exist.json"}, {"seed", 1}};
    CHECK_THROWS_AS(run_experiment("fk", missing, configs), ConfigError);
    json wrong{{"experiment", "phase"}, {"seed", 1}};
    CHECK_THROWS_AS(run_experiment("fk", wrong, configs), ConfigError);
    json ring2{{"graph", {{"ring", 2}}}, {"initial", {{"nodes", {{"0", 1}}}}}, {"seed", 1}};
    try {
        run_experiment("fluct", ring2, configs);
        FAIL("n = 2 ring accepted");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()) == "ring requires n ≥ 3");
    }
    json few{{"graph", "two_node.json"}, {"phi", {{"a", 1}}}, {"seed", 1}, {"replicas", 1}};
    CHECK_THROWS_AS(run_experiment("fk", few, configs), ConfigError);
    json badnode{{"graph", "two_node.json"}, {"phi", {{"z", 1}}}, {"seed", 1}};
    CHECK_THROWS_AS(run_experiment("fk", badnode, configs), ConfigError);
}

TEST_CASE("bundled two-node Feynman-Kac config") {
    auto cfg = load_config(configs / "fk_two_node.json");
    auto res = run_experiment("fk", cfg, configs);
    REQUIRE(res.rows.size() == 1);
    const auto& r = res.rows[0];
    CHECK(r.experiment == "fk:u(a)");
    CHECK(*r.R == 10000);
    CHECK(*r.seed == 20240601u);
    const double exact = 0.5 * (1.0 + std::cos(std::sqrt(2.0)));
    CHECK(std::abs(r.estimate - exact) <= 3.0 * *r.stderr_);
    CHECK(res.details["ode_reference"]["a"].get<double>() == doctest::Approx(exact).epsilon(1e-5));
    CHECK(res.details["rounding_residual"] == 0.0);

    // resolved config carries the defaults that were used
    CHECK(res.config["ode_dt"] == 1e-3);
    CHECK(res.config["threads"] == 0);
    CHECK(res.config["experiment"] == "fk");
    CHECK(res.config["graph"].contains("spec"));

    auto csv = lines_of(render_csv(res));
    REQUIRE(csv.size() == 5);
    CHECK(csv[0] == std::string("# wavegraph ") + WAVEGRAPH_VERSION);
    CHECK(csv[1] == "# config_hash " + hash_string(config_hash(res.config)));
    CHECK(csv[2] == "# seed 20240601");
    CHECK(csv[3] == "experiment,n,N,t,R,seed,estimate,stderr,bound");
    auto cols = split(csv[4]);
    REQUIRE(cols.size() == 9);
    CHECK(cols[1] == "2");
    CHECK(cols[2].empty());
    CHECK(cols[8].empty());
    CHECK(std::stod(cols[6]) == r.estimate);

    auto summary = render_summary(res);
    CHECK(summary["config"] == res.config);
    CHECK(summary["rows"].size() == 1);
    CHECK(summary["seed"] == 20240601);
}

TEST_CASE("results do not depend on the thread count") {
    json cfg{{"n", {8, 12}}, {"N", {20, 30}}, {"t", 0.2}, {"replicas", 40}, {"seed", 99}};
    json one = cfg, four = cfg;
    one["threads"] = 1;
    four["threads"] = 4;
    auto a = run_experiment("hydro", one);
    auto b = run_experiment("hydro", four);
    CHECK(render_csv(a) == render_csv(b));
    CHECK(a.rows.size() == 2);
    CHECK(*a.rows[1].n == 12);
    CHECK(*a.rows[1].N == 30);
}

TEST_CASE("solve writes a solution attachment and conserves energy") {
    json cfg{{"graph", "two_node.json"}, {"phi", {{"a", 1}}}, {"T", 1.0}, {"dt", 0.25}, {"every", 1}};
    auto res = run_experiment("solve", cfg, configs);
    REQUIRE(res.attachments.size() == 1);
    CHECK(res.attachments[0].first == "solution");
    auto body = lines_of(res.attachments[0].second);
    CHECK(body.size() == 1 + 5 * 3);
    CHECK(body[1] == "0,node,a,0");
    CHECK(body[3] == "0,edge,a-b,-1");
    CHECK(res.rows.back().experiment == "solve:energy_drift");
    CHECK(res.rows.back().estimate < 1e-12);
}

TEST_CASE("oracle and trajectory dump") {
    json cfg{{"graph", "two_node.json"}, {"initial", {{"nodes", {{"a", 1}}}}}, {"t", 0.3}, {"J", 8},
             {"replicas", 2000}, {"seed", 5}, {"trajectory", {{"t", 0.3}}}};
    auto res = run_experiment("oracle", cfg, configs);
    CHECK(res.rows.size() == 8);
    for (std::size_t i = 0; i < res.rows.size(); i += 2) {
        const auto& mc = res.rows[i];
        const auto& ex = res.rows[i + 1];
        CHECK(std::abs(mc.estimate - ex.estimate) <= 4.0 * *mc.stderr_ + *ex.bound);
    }
    REQUIRE(res.attachments.size() == 1);
    auto dump = lines_of(res.attachments[0].second);
    CHECK(dump[0] == "n,tau,kind,id,sign");
    for (std::size_t i = 1; i < dump.size(); ++i) {
        auto c = split(dump[i]);
        REQUIRE(c.size() == 5);
        CHECK(std::stoul(c[0]) == i);
        CHECK(std::stod(c[1]) <= 0.3);
        CHECK((c[4] == "1" || c[4] == "-1"));
    }
}

TEST_CASE("outputs land under WAVEGRAPH_OUTPUT_DIR") {
    auto dir = std::filesystem::temp_directory_path() / "wavegraph_test_outputs";
    std::filesystem::remove_all(dir);
    setenv("WAVEGRAPH_OUTPUT_DIR", dir.c_str(), 1);
    json cfg{{"graph", "two_node.json"}, {"phi", {{"a", 1}}}, {"T", 0.5}, {"dt", 0.25}, {"output", "s/solve.csv"}};
    auto res = run_experiment("solve", cfg, configs);
    auto paths = write_outputs(res);
    unsetenv("WAVEGRAPH_OUTPUT_DIR");
    REQUIRE(paths.size() == 3);
    CHECK(paths[0] == dir / "s/solve.csv");
    CHECK(paths[1] == dir / "s/solve.json");
    CHECK(paths[2] == dir / "s/solve.solution.csv");
    for (const auto& p : paths) CHECK(std::filesystem::exists(p));
    std::ifstream in(paths[1]);
    json summary = json::parse(in);
    CHECK(summary["config_hash"] == hash_string(config_hash(res.config)));
    std::filesystem::remove_all(dir);
}
