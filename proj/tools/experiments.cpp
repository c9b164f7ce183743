#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "wavegraph/estimators.hpp"
#include "wavegraph/generator_oracle.hpp"
#include "wavegraph/graph.hpp"
#include "wavegraph/graph_io.hpp"
#include "wavegraph/hydro.hpp"
#include "wavegraph/hydro_error.hpp"
#include "wavegraph/periodic.hpp"
#include "wavegraph/simulator.hpp"
#include "wavegraph/wave_ode.hpp"

namespace wavegraph::cli {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds{"solve", "fk",    "meanfield", "fluct", "rate",
                                                "hydro", "phase", "yule",      "oracle"};
    return kinds;
}

std::string canonical_kind(const std::string& name) {
    static const std::vector<std::pair<std::string, std::string>> aliases{
        {"feynman-kac", "fk"},   {"mean-field-check", "meanfield"}, {"mean-field", "meanfield"},
        {"fluctuation", "fluct"}, {"energy-rate", "rate"},           {"yule-check", "yule"},
        {"oracle-check", "oracle"}};
    for (const auto& [alias, kind] : aliases)
        if (name == alias) return kind;
    const auto& k = experiment_kinds();
    if (std::find(k.begin(), k.end(), name) != k.end()) return name;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

json load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
}

void apply_override(json& config, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &config;
    std::size_t start = 0;
    for (;;) {
        auto dot = key.find('.', start);
        std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
        if (!node->is_object()) throw ConfigError("override key '" + key + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

std::uint64_t config_hash(const json& resolved) {
    json h = resolved;
    if (h.is_object()) {
        h.erase("threads");
        h.erase("output");
    }
    const std::string s = h.dump();
    std::uint64_t x = 14695981039346656037ull;
    for (unsigned char c : s) {
        x ^= c;
        x *= 1099511628211ull;
    }
    return x;
}

std::string hash_string(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// ---- config access; every default read is written back into the resolved config

template <class T>
T get_or(json& cfg, const std::string& key, T fallback) {
    if (!cfg.contains(key) || cfg[key].is_null()) cfg[key] = fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + key + "' has the wrong type");
    }
}

template <class T>
T require(const json& cfg, const std::string& key) {
    if (!cfg.contains(key)) throw ConfigError("config field '" + key + "' is required");
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + key + "' has the wrong type");
    }
}

std::uint64_t require_seed(const json& cfg) {
    if (!cfg.contains("seed")) throw ConfigError("config field 'seed' is required; seeds are never drawn from the clock");
    const json& s = cfg.at("seed");
    if (!s.is_number_integer()) throw ConfigError("config field 'seed' must be a non-negative integer");
    if (s.is_number_unsigned()) return s.get<std::uint64_t>();
    auto v = s.get<std::int64_t>();
    if (v < 0) throw ConfigError("config field 'seed' must be a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

ReplicaPlan plan_from(json& cfg, std::int64_t default_replicas) {
    ReplicaPlan p;
    p.seed = require_seed(cfg);
    p.replicas = get_or<std::int64_t>(cfg, "replicas", default_replicas);
    auto threads = get_or<std::int64_t>(cfg, "threads", 0);
    if (threads < 0) throw ConfigError("config field 'threads' must be non-negative");
    p.threads = static_cast<unsigned>(threads);
    if (p.replicas < 2) throw ConfigError("config field 'replicas' must be at least 2");
    return p;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::vector<double> times_from(json& cfg, const std::string& key, std::vector<double> fallback) {
    if (cfg.contains(key) && cfg[key].is_number()) cfg[key] = json::array({cfg[key]});
    auto ts = get_or<std::vector<double>>(cfg, key, std::move(fallback));
    if (ts.empty()) throw ConfigError("config field '" + key + "' must list at least one time");
    for (double t : ts)
        if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("times must be finite and non-negative");
    if (!std::is_sorted(ts.begin(), ts.end())) throw ConfigError("config field '" + key + "' must be sorted");
    return ts;
}

double time_from(json& cfg, const std::string& key, double fallback) {
    double t = get_or<double>(cfg, key, fallback);
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("config field '" + key + "' must be finite and non-negative");
    return t;
}

// ---- graph and data

Graph graph_from(json& cfg, const fs::path& base) {
    if (!cfg.contains("graph")) throw ConfigError("config field 'graph' is required");
    json& g = cfg["graph"];
    if (g.is_string()) g = json{{"file", g}};
    if (!g.is_object()) throw ConfigError("config field 'graph' must be an object");
    if (g.contains("ring")) {
        if (!g["ring"].is_number_integer()) throw ConfigError("graph.ring must be an integer");
        return ring_graph(g["ring"].get<std::int64_t>());
    }
    if (g.contains("file")) {
        fs::path p = g["file"].get<std::string>();
        if (p.is_relative()) p = base / p;
        if (!fs::exists(p)) throw ConfigError("graph file " + p.string() + " does not exist");
        GraphSpec spec = load_graph_spec(p);
        g["spec"] = to_json(spec);
        return build_graph(spec);
    }
    return build_graph(parse_graph_spec(g));
}

std::string node_label(const Graph& g, NodeId x) { return "node(" + g.name(x) + ")"; }
std::string edge_label(const Graph& g, EdgeId e) {
    return "edge(" + g.name(g.tail(e)) + "-" + g.name(g.head(e)) + ")";
}

NodeId node_ref(const Graph& g, const std::string& id) {
    auto x = g.find_node(id);
    if (!x) throw ConfigError("unknown node '" + id + "'");
    return *x;
}

// Node values by id ({"a": 1}) or as a full array in node order; missing ids are 0.
std::vector<double> node_values(json& cfg, const std::string& key, const Graph& g) {
    std::vector<double> v(static_cast<std::size_t>(g.node_count()), 0.0);
    if (!cfg.contains(key) || cfg[key].is_null()) {
        cfg[key] = json::object();
        return v;
    }
    const json& j = cfg[key];
    if (j.is_array()) {
        if (static_cast<std::int64_t>(j.size()) != g.node_count())
            throw ConfigError("config field '" + key + "' needs one value per node");
        for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
        return v;
    }
    if (!j.is_object()) throw ConfigError("config field '" + key + "' must map node ids to values");
    for (const auto& [id, val] : j.items()) {
        if (!val.is_number()) throw ConfigError("config field '" + key + "." + id + "' must be a number");
        v[static_cast<std::size_t>(node_ref(g, id))] = val.get<double>();
    }
    return v;
}

const PeriodicData& default_wave() {
    static const PeriodicData d = [] {
        PeriodicData p;
        p.psi = FourierSeries({{1, 0.0, 1.0}});
        return p;
    }();
    return d;
}

PeriodicData data_from(json& cfg, const std::string& key) {
    if (!cfg.contains(key)) cfg[key] = to_json(default_wave());
    try {
        PeriodicData d = parse_periodic_data(cfg[key]);
        cfg[key] = to_json(d);
        return d;
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config field '" + key + "': " + e.what());
    }
}

// "initial": {"nodes": {id: count}, "edges": [{"tail", "head", "value"}]} or, on a
// ring, {"N": density, "data": periodic data} for the floored hydrodynamic start.
ParticleState<Graph> initial_from(json& cfg, const Graph& g) {
    if (!cfg.contains("initial")) throw ConfigError("config field 'initial' is required");
    json& in = cfg["initial"];
    if (!in.is_object()) throw ConfigError("config field 'initial' must be an object");
    if (in.contains("N")) {
        if (!g.ring_size()) throw ConfigError("initial.N needs a ring graph");
        auto N = require<std::int64_t>(in, "N");
        PeriodicData d = data_from(in, "data");
        return hydro_init(g, N, d);
    }
    std::vector<std::pair<NodeId, double>> nodes;
    std::vector<std::pair<EdgeId, double>> edges;
    if (in.contains("nodes")) {
        for (const auto& [id, val] : in["nodes"].items()) {
            if (!val.is_number()) throw ConfigError("initial.nodes." + id + " must be a number");
            nodes.emplace_back(node_ref(g, id), val.get<double>());
        }
    }
    if (in.contains("edges")) {
        for (const auto& e : in["edges"]) {
            NodeId a = node_ref(g, require<std::string>(e, "tail"));
            NodeId b = node_ref(g, require<std::string>(e, "head"));
            auto id = g.find_edge(a, b);
            if (!id) throw ConfigError("no edge between '" + g.name(a) + "' and '" + g.name(b) + "'");
            double v = require<double>(e, "value");
            edges.emplace_back(*id, g.tail(*id) == a ? v : -v);
        }
    }
    return init_state(g, nodes, edges);
}

ResultRow row(std::string name, const Graph& g, double t, const McEstimate& m) {
    ResultRow r;
    r.experiment = std::move(name);
    r.n = g.node_count();
    r.t = t;
    r.R = m.replicas;
    r.seed = m.seed;
    r.estimate = m.estimate;
    r.stderr_ = m.std_error;
    return r;
}

ResultRow exact_row(std::string name, const Graph& g, double t, double value) {
    ResultRow r;
    r.experiment = std::move(name);
    r.n = g.node_count();
    r.t = t;
    r.estimate = value;
    return r;
}

// Optional debug dump of one replica: "trajectory": {"output": path, "replica": r, "t": T}.
void dump_trajectory(json& cfg, ExperimentResult& out, const ParticleState<Graph>& f0, double horizon,
                     std::uint64_t seed) {
    if (!cfg.contains("trajectory")) return;
    json& tj = cfg["trajectory"];
    if (!tj.is_object()) throw ConfigError("config field 'trajectory' must be an object");
    auto replica = get_or<std::int64_t>(tj, "replica", 0);
    double T = time_from(tj, "t", horizon);
    get_or<std::string>(tj, "suffix", "trajectory");
    const Graph& g = f0.graph();
    std::ostringstream os;
    os << "n,tau,kind,id,sign\n";
    Observer<Graph> obs;
    char buf[64];
    obs.on_event([&](const EventRecord& ev, const ParticleState<Graph>&) {
        std::snprintf(buf, sizeof buf, "%.17g", ev.time);
        os << ev.index << ',' << buf << ',';
        if (ev.kind == EntityKind::node)
            os << "node," << g.name(ev.id);
        else
            os << "edge," << g.name(g.tail(ev.id)) << '-' << g.name(g.head(ev.id));
        os << ',' << ev.sign << '\n';
    });
    Rng rng = replica_rng(seed, static_cast<std::uint64_t>(replica));
    ParticleState<Graph> s = f0;
    simulate(s, T, obs, rng);
    out.attachments.emplace_back(tj["suffix"].get<std::string>(), os.str());
}

OdeReference ode_from(json& cfg) {
    OdeReference o;
    o.dt = get_or<double>(cfg, "ode_dt", 1e-3);
    if (!(o.dt > 0.0)) throw ConfigError("config field 'ode_dt' must be positive");
    return o;
}

Field ode_mean(const Field& zeta, double t, double dt) {
    if (t == 0.0) return zeta;
    auto sol = solve_ibvp(zeta.graph(), zeta, t, dt);
    return sol.at(t);
}

bool vanishes_on_boundary(const ParticleState<Graph>& f) {
    const Graph& g = f.graph();
    for (NodeId x = 0; x < g.node_count(); ++x)
        if (g.is_fixed(x) && f.node(x) != 0) return false;
    return true;
}

// ---- experiments

void run_solve(json& cfg, const fs::path& base, ExperimentResult& out) {
    Graph g = graph_from(cfg, base);
    auto phi = node_values(cfg, "phi", g);
    auto psi = node_values(cfg, "psi", g);
    double T = time_from(cfg, "T", 1.0);
    double dt = get_or<double>(cfg, "dt", 1e-3);
    OdeOptions opt;
    opt.tolerance = get_or<double>(cfg, "tolerance", opt.tolerance);
    Field zeta = make_zeta(g, phi, psi);
    auto sol = solve_ibvp(g, zeta, T, dt, opt);
    auto every = get_or<std::int64_t>(cfg, "every", std::max<std::int64_t>(1, static_cast<std::int64_t>(sol.steps()) / 100));

    double e0 = inner_product(sol.initial(), sol.initial());
    double drift = 0.0;
    for (std::size_t k = 0; k <= sol.steps(); ++k) {
        double e = inner_product(sol.snapshot(k), sol.snapshot(k));
        drift = std::max(drift, e0 > 0.0 ? std::abs(e - e0) / e0 : std::abs(e - e0));
    }
    for (NodeId x = 0; x < g.node_count(); ++x)
        out.rows.push_back(exact_row("solve:u(" + g.name(x) + ")", g, T, reconstruct_u(phi, sol, x, T)));
    out.rows.push_back(exact_row("solve:energy_drift", g, T, drift));
    out.details["steps"] = sol.steps();
    out.details["dt"] = sol.dt();
    out.details["max_cg_iterations"] = sol.max_iterations_used();

    std::ostringstream os;
    write_solution_csv(os, g, sol, static_cast<std::size_t>(std::max<std::int64_t>(1, every)));
    out.attachments.emplace_back("solution", os.str());
}

void run_fk(json& cfg, const fs::path& base, ExperimentResult& out) {
    Graph g = graph_from(cfg, base);
    auto phi = node_values(cfg, "phi", g);
    auto psi = node_values(cfg, "psi", g);
    double t = time_from(cfg, "t", 1.0);
    auto plan = plan_from(cfg, 10000);
    auto ode = ode_from(cfg);

    std::vector<NodeId> targets;
    if (!cfg.contains("targets")) {
        json all = json::array();
        for (NodeId x = 0; x < g.node_count(); ++x) all.push_back(g.name(x));
        cfg["targets"] = all;
    }
    for (const auto& id : cfg["targets"]) targets.push_back(node_ref(g, id.get<std::string>()));

    auto res = feynman_kac(g, phi, psi, targets, t, plan);
    json refs = json::object();
    Field zeta = make_zeta(g, phi, psi);
    OdeSolution sol = solve_ibvp(g, zeta, t, ode.dt);
    for (NodeId x : targets) {
        out.rows.push_back(row("fk:u(" + g.name(x) + ")", g, t, res.values.at(x)));
        refs[g.name(x)] = reconstruct_u(phi, sol, x, t);
    }
    out.details["rounding_residual"] = res.rounding_residual;
    out.details["ode_reference"] = refs;
    if (res.rounding_residual > 0.0)
        out.details["warning"] = "initial data are not integer-valued and were floored";
}

void run_meanfield(json& cfg, const fs::path& base, ExperimentResult& out) {
    Graph g = graph_from(cfg, base);
    auto f0 = initial_from(cfg, g);
    auto times = times_from(cfg, "times", {0.1, 0.2, 0.4});
    auto plan = plan_from(cfg, 5000);
    auto ode = ode_from(cfg);
    auto samples = mean_field(f0, times, plan);
    const bool have_ref = vanishes_on_boundary(f0);
    Field zeta = to_field(f0);
    json refs = json::array();
    std::int64_t within = 0, total = 0;
    for (const auto& s : samples) {
        std::optional<Field> ref;
        if (have_ref) ref = ode_mean(zeta, s.t, ode.dt);
        auto add = [&](std::string label, double mean, double se, std::optional<double> r) {
            McEstimate m{mean, se, plan.replicas, plan.seed};
            out.rows.push_back(row("meanfield:" + label, g, s.t, m));
            refs.push_back(r ? json(*r) : json(nullptr));
            if (r) {
                ++total;
                if (std::abs(mean - *r) <= 4.0 * se + 1e-12) ++within;
            }
        };
        for (NodeId x = 0; x < g.node_count(); ++x)
            add(node_label(g, x), s.mean.node(x), s.std_error.node(x),
                ref ? std::optional<double>(ref->node(x)) : std::nullopt);
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            add(edge_label(g, e), s.mean.edge(e), s.std_error.edge(e),
                ref ? std::optional<double>(ref->edge(e)) : std::nullopt);
    }
    out.details["ode_reference"] = refs;
    if (total > 0) out.details["fraction_within_4_stderr"] = static_cast<double>(within) / static_cast<double>(total);
    dump_trajectory(cfg, out, f0, times.back(), plan.seed);
}

void run_fluct(json& cfg, const fs::path& base, ExperimentResult& out) {
    Graph g = graph_from(cfg, base);
    auto f0 = initial_from(cfg, g);
    auto times = times_from(cfg, "times", {0.5, 1.0});
    auto plan = plan_from(cfg, 10000);
    auto ode = ode_from(cfg);
    auto est = fluctuation(f0, times, plan, ode);
    json lln = json::array(), fin = json::array();
    for (std::size_t i = 0; i < times.size(); ++i) {
        double b1 = lln_bound(f0, times[i]);
        double b2 = finite_bound(f0, times[i]);
        ResultRow r = row("fluct", g, times[i], est[i]);
        r.bound = std::min(b1, b2);
        out.rows.push_back(r);
        lln.push_back(b1);
        fin.push_back(b2);
    }
    out.details["lln_bound"] = lln;
    out.details["finite_bound"] = fin;
    dump_trajectory(cfg, out, f0, times.back(), plan.seed);
}

void run_rate(json& cfg, const fs::path& base, ExperimentResult& out) {
    Graph g = graph_from(cfg, base);
    auto f0 = initial_from(cfg, g);
    double t = time_from(cfg, "t", 0.2);
    double h = get_or<double>(cfg, "dt_fd", 0.02);
    auto plan = plan_from(cfg, 20000);
    auto chk = energy_rate_check(f0, t, h, plan);
    out.rows.push_back(row("rate:lhs", g, t, chk.lhs));
    out.rows.push_back(row("rate:rhs", g, t, chk.rhs));
    const double allowance = 4.0 * M_PI * M_PI * h * h * std::abs(chk.rhs.estimate);
    out.details["dt_fd"] = h;
    out.details["allowance"] = allowance;
    out.details["combined_stderr"] = std::hypot(chk.lhs.std_error, chk.rhs.std_error);
    dump_trajectory(cfg, out, f0, t + h, plan.seed);
}

ResultRow hydro_row(const std::string& name, const HydroErrorResult& h) {
    ResultRow r;
    r.experiment = name;
    r.n = h.n;
    r.N = h.N;
    r.t = h.t;
    r.R = h.err.replicas;
    r.seed = h.err.seed;
    r.estimate = h.err.estimate;
    r.stderr_ = h.err.std_error;
    return r;
}

json hydro_json(const HydroErrorResult& h) {
    return {{"n", h.n},
            {"N", h.N},
            {"err", h.err.estimate},
            {"err_stderr", h.err.std_error},
            {"velocity", h.velocity.estimate},
            {"gradient", h.gradient.estimate},
            {"bias", h.bias},
            {"scaled_fluctuation", h.scaled_fluctuation.estimate},
            {"scaled_fluctuation_stderr", h.scaled_fluctuation.std_error},
            {"decomposition_residual", h.decomposition_residual.estimate},
            {"decomposition_residual_stderr", h.decomposition_residual.std_error}};
}

HydroOptions hydro_options(json& cfg) {
    HydroOptions o;
    o.ode_dt = get_or<double>(cfg, "ode_dt", 0.0);
    if (o.ode_dt < 0.0) throw ConfigError("config field 'ode_dt' must be non-negative");
    return o;
}

void run_hydro(json& cfg, const fs::path&, ExperimentResult& out) {
    auto ns = get_or<std::vector<std::int64_t>>(cfg, "n", {16, 32});
    auto Ns = get_or<std::vector<std::int64_t>>(cfg, "N", {512, 2048});
    if (ns.size() != Ns.size() || ns.empty()) throw ConfigError("config fields 'n' and 'N' must be lists of equal length");
    auto data = data_from(cfg, "data");
    double t = time_from(cfg, "t", 0.25);
    auto plan = plan_from(cfg, 200);
    auto opts = hydro_options(cfg);
    json runs = json::array();
    for (std::size_t i = 0; i < ns.size(); ++i) {
        ReplicaPlan p = plan;
        p.seed = derive_seed(plan.seed, i);
        auto h = hydro_error(ns[i], Ns[i], data, t, p, opts);
        out.rows.push_back(hydro_row("hydro:err", h));
        runs.push_back(hydro_json(h));
    }
    out.details["runs"] = runs;
}

std::int64_t family_density(const std::string& family, std::int64_t n) {
    const double nd = static_cast<double>(n);
    if (family == "supercritical") return static_cast<std::int64_t>(std::ceil(nd * std::sqrt(nd) - 1e-9));
    if (family == "critical") return 2 * n;
    return static_cast<std::int64_t>(std::ceil(std::sqrt(nd) - 1e-9));
}

void run_phase(json& cfg, const fs::path&, ExperimentResult& out) {
    auto ns = get_or<std::vector<std::int64_t>>(cfg, "n", {16, 32, 64});
    auto data = data_from(cfg, "data");
    double t = time_from(cfg, "t", 0.25);
    auto plan = plan_from(cfg, 200);
    auto opts = hydro_options(cfg);
    bool weak = get_or<bool>(cfg, "weak_error", true);
    auto freq = get_or<std::int64_t>(cfg, "frequency", 1);
    auto kind_name = get_or<std::string>(cfg, "test_function", "cosine");
    if (kind_name != "cosine" && kind_name != "sine") throw ConfigError("test_function must be 'cosine' or 'sine'");
    const TestFunction kind = kind_name == "cosine" ? TestFunction::cosine : TestFunction::sine;

    static const std::vector<std::string> families{"supercritical", "critical", "subcritical"};
    json runs = json::array();
    json weak_rows = json::array();
    std::uint64_t index = 0;
    for (const auto& fam : families) {
        for (auto n : ns) {
            const auto N = family_density(fam, n);
            ReplicaPlan p = plan;
            p.seed = derive_seed(plan.seed, index++);
            auto h = hydro_error(n, N, data, t, p, opts);
            out.rows.push_back(hydro_row("phase:" + fam, h));
            json j = hydro_json(h);
            j["family"] = fam;
            j["seed"] = p.seed;
            runs.push_back(j);
        }
    }
    if (weak) {
        for (auto n : ns) {
            const auto N = family_density("critical", n);
            ReplicaPlan p = plan;
            p.seed = derive_seed(plan.seed, index++);
            auto w = weak_error(n, N, data, t, freq, kind, p, opts);
            weak_rows.push_back({{"family", "critical"},
                                 {"n", n},
                                 {"N", N},
                                 {"seed", p.seed},
                                 {"weak", w.weak.estimate},
                                 {"weak_stderr", w.weak.std_error},
                                 {"eigen_fluctuation", w.eigen_fluctuation.estimate},
                                 {"eigen_fluctuation_stderr", w.eigen_fluctuation.std_error}});
        }
    }
    out.details["runs"] = runs;
    out.details["weak_error"] = weak_rows;
}

void run_yule(json& cfg, const fs::path& base, ExperimentResult& out) {
    double lambda = get_or<double>(cfg, "lambda", 1.0);
    auto r = get_or<std::int64_t>(cfg, "r", 1);
    double t = time_from(cfg, "t", 1.0);
    auto plan = plan_from(cfg, 100000);
    auto table = run_replicas(plan, 2, [&](std::size_t, Rng& rng, std::span<double> rowv) {
        auto k = yule_simulate(lambda, r, t, rng);
        rowv[0] = static_cast<double>(k);
        rowv[1] = static_cast<double>(r) + static_cast<double>(k);
    });
    ResultRow tilde;
    tilde.experiment = "yule:tilde";
    tilde.t = t;
    auto m = table.column(0, plan.seed);
    tilde.R = m.replicas;
    tilde.seed = m.seed;
    tilde.estimate = m.estimate;
    tilde.stderr_ = m.std_error;
    tilde.bound = static_cast<double>(r) * std::exp(lambda * t);
    out.rows.push_back(tilde);
    ResultRow pop = tilde;
    pop.experiment = "yule:population";
    auto mp = table.column(1, plan.seed);
    pop.estimate = mp.estimate;
    pop.stderr_ = mp.std_error;
    out.rows.push_back(pop);
    out.details["negative_binomial_mean"] = static_cast<double>(r) * std::expm1(lambda * t);

    if (!cfg.contains("graph")) return;
    Graph g = graph_from(cfg, base);
    auto f0 = initial_from(cfg, g);
    auto times = times_from(cfg, "times", {0.5, 1.0});
    ReplicaPlan gp = plan;
    gp.seed = derive_seed(plan.seed, 0);
    auto jumps = run_replicas(gp, times.size(), [&](std::size_t, Rng& rng, std::span<double> rowv) {
        Observer<Graph> obs;
        obs.sample_at(times, [&](std::size_t i, double, const ParticleState<Graph>&) {
            rowv[i] = static_cast<double>(obs.jumps());
        });
        ParticleState<Graph> s = f0;
        simulate(s, times.back(), obs, rng);
    });
    const double Md = g.constants().Md();
    const double l1 = norm_alpha(f0, 1.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        ResultRow rr = row("yule:eta", g, times[i], jumps.column(i, gp.seed));
        rr.bound = (l1 / Md + 1.0) * std::exp(Md * times[i]);
        out.rows.push_back(rr);
    }
}

void run_oracle(json& cfg, const fs::path& base, ExperimentResult& out) {
    Graph g = graph_from(cfg, base);
    auto f0 = initial_from(cfg, g);
    double t = time_from(cfg, "t", 0.3);
    auto J = get_or<std::int64_t>(cfg, "J", 12);
    auto cap = get_or<std::int64_t>(cfg, "max_states", 100000);
    if (J < 0 || cap < 1) throw ConfigError("config fields 'J' and 'max_states' must be non-negative");
    auto plan = plan_from(cfg, 100000);

    GeneratorOracle oracle(g, f0, static_cast<std::uint64_t>(J), static_cast<std::size_t>(cap));
    const Configuration c0 = to_configuration(f0);
    std::vector<std::string> labels;
    std::vector<OracleFunctional> fns;
    for (NodeId x = 0; x < g.node_count(); ++x) {
        labels.push_back(node_label(g, x));
        fns.push_back(oracle_node_value(g, c0, x));
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        labels.push_back(edge_label(g, e));
        fns.push_back(oracle_edge_value(g, c0, e));
    }
    labels.push_back("norm2");
    fns.push_back(oracle_squared_norm(g, c0));
    auto exact = oracle.expectations(t, fns);

    auto table = run_replicas(plan, fns.size(), [&](std::size_t, Rng& rng, std::span<double> rowv) {
        ParticleState<Graph> s = f0;
        Trajectory<Graph> traj(std::move(s));
        traj.simulate(t, rng);
        const Configuration c = to_configuration(traj.state());
        for (std::size_t i = 0; i < fns.size(); ++i) rowv[i] = fns[i].value(c);
    });
    for (std::size_t i = 0; i < fns.size(); ++i) {
        out.rows.push_back(row("oracle:mc:" + labels[i], g, t, table.column(i, plan.seed)));
        ResultRow ex = exact_row("oracle:exact:" + labels[i], g, t, exact[i].value);
        ex.bound = exact[i].truncation_bound;
        out.rows.push_back(ex);
    }
    out.details["states"] = oracle.state_count();
    out.details["uniformization_rate"] = oracle.uniformization_rate();
    out.details["escape_bound"] = oracle.escape_bound(t);
    dump_trajectory(cfg, out, f0, t, plan.seed);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExperimentResult run_experiment(const std::string& kind_in, json config, const fs::path& base_dir) {
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    const std::string kind = canonical_kind(kind_in);
    if (config.contains("experiment")) {
        if (!config["experiment"].is_string()) throw ConfigError("config field 'experiment' must be a string");
        if (canonical_kind(config["experiment"].get<std::string>()) != kind)
            throw ConfigError("config is for experiment '" + config["experiment"].get<std::string>() +
                              "', not '" + kind + "'");
    }
    config["experiment"] = kind;
    get_or<std::string>(config, "output", kind + ".csv");

    ExperimentResult out;
    out.experiment = kind;
    if (kind == "solve") run_solve(config, base_dir, out);
    else if (kind == "fk") run_fk(config, base_dir, out);
    else if (kind == "meanfield") run_meanfield(config, base_dir, out);
    else if (kind == "fluct") run_fluct(config, base_dir, out);
    else if (kind == "rate") run_rate(config, base_dir, out);
    else if (kind == "hydro") run_hydro(config, base_dir, out);
    else if (kind == "phase") run_phase(config, base_dir, out);
    else if (kind == "yule") run_yule(config, base_dir, out);
    else run_oracle(config, base_dir, out);
    out.config = std::move(config);
    return out;
}

std::string render_csv(const ExperimentResult& result) {
    std::ostringstream os;
    os << "# wavegraph " << WAVEGRAPH_VERSION << '\n';
    os << "# config_hash " << hash_string(config_hash(result.config)) << '\n';
    os << "# seed " << (result.config.contains("seed") ? result.config["seed"].dump() : "none") << '\n';
    os << "experiment,n,N,t,R,seed,estimate,stderr,bound\n";
    for (const auto& r : result.rows) {
        os << r.experiment << ',';
        if (r.n) os << *r.n;
        os << ',';
        if (r.N) os << *r.N;
        os << ',' << fmt(r.t) << ',';
        if (r.R) os << *r.R;
        os << ',';
        if (r.seed) os << *r.seed;
        os << ',' << fmt(r.estimate) << ',';
        if (r.stderr_) os << fmt(*r.stderr_);
        os << ',';
        if (r.bound) os << fmt(*r.bound);
        os << '\n';
    }
    return os.str();
}

json render_summary(const ExperimentResult& result) {
    json rows = json::array();
    for (const auto& r : result.rows) {
        json j{{"experiment", r.experiment}, {"t", r.t}, {"estimate", r.estimate}};
        j["n"] = r.n ? json(*r.n) : json(nullptr);
        j["N"] = r.N ? json(*r.N) : json(nullptr);
        j["R"] = r.R ? json(*r.R) : json(nullptr);
        j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
        j["stderr"] = r.stderr_ ? json(*r.stderr_) : json(nullptr);
        j["bound"] = r.bound ? json(*r.bound) : json(nullptr);
        rows.push_back(j);
    }
    return {{"version", WAVEGRAPH_VERSION},
            {"experiment", result.experiment},
            {"config_hash", hash_string(config_hash(result.config))},
            {"seed", result.config.value("seed", json(nullptr))},
            {"config", result.config},
            {"rows", rows},
            {"details", result.details}};
}

fs::path output_path(const ExperimentResult& result) {
    fs::path p = result.config.value("output", result.experiment + ".csv");
    if (p.is_relative()) {
        if (const char* dir = std::getenv("WAVEGRAPH_OUTPUT_DIR"); dir && *dir) p = fs::path(dir) / p;
    }
    return p;
}

namespace {

void write_file(const fs::path& p, const std::string& body) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << body;
    if (!os) throw std::runtime_error("write to " + p.string() + " failed");
}

}  // namespace

std::vector<fs::path> write_outputs(const ExperimentResult& result) {
    std::vector<fs::path> written;
    const fs::path csv = output_path(result);
    write_file(csv, render_csv(result));
    written.push_back(csv);

    fs::path summary = csv;
    summary.replace_extension(".json");
    write_file(summary, render_summary(result).dump(2) + "\n");
    written.push_back(summary);

    std::ostringstream meta;
    meta << "# wavegraph " << WAVEGRAPH_VERSION << '\n'
         << "# config_hash " << hash_string(config_hash(result.config)) << '\n'
         << "# seed " << (result.config.contains("seed") ? result.config["seed"].dump() : "none") << '\n';
    for (const auto& [suffix, body] : result.attachments) {
        fs::path p = csv;
        p.replace_extension("." + suffix + ".csv");
        write_file(p, meta.str() + body);
        written.push_back(p);
    }
    return written;
}

}  // namespace wavegraph::cli
