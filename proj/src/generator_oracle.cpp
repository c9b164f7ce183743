#include "wavegraph/generator_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace wavegraph {

namespace {

constexpr double poisson_eps = 1e-15;

double sup_norm(const Configuration& c) {
    double s = 0.0;
    for (auto v : c) s = std::max(s, std::abs(static_cast<double>(v)));
    return s;
}

double l1_norm(const Graph& g, const Configuration& c) {
    const auto nv = static_cast<std::size_t>(g.node_count());
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double w = i < nv ? g.inv_mass(static_cast<NodeId>(i)) : g.weight(static_cast<EdgeId>(i - nv));
        s += w * std::abs(static_cast<double>(c[i]));
    }
    return s;
}

double squared(const Graph& g, const Configuration& c) {
    const auto nv = static_cast<std::size_t>(g.node_count());
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double w = i < nv ? g.inv_mass(static_cast<NodeId>(i)) : g.weight(static_cast<EdgeId>(i - nv));
        s += w * static_cast<double>(c[i]) * static_cast<double>(c[i]);
    }
    return s;
}

// Advances the uniformized chain by one step: v <- v P with P = I + Q / lambda.
void uniform_step(const std::vector<double>& v, std::vector<double>& out, const std::vector<double>& exit,
                  const std::vector<std::size_t>& start, const std::vector<GeneratorOracle::Entry>& entries,
                  double lambda) {
    const std::size_t n = exit.size();
    std::fill(out.begin(), out.end(), 0.0);
    out[n] = v[n];
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] == 0.0) continue;
        out[i] += v[i] * (1.0 - exit[i] / lambda);
        for (std::size_t k = start[i]; k < start[i + 1]; ++k) out[entries[k].target] += v[i] * entries[k].rate / lambda;
    }
}

}  // namespace

Configuration to_configuration(const ParticleState<Graph>& f) {
    const Graph& g = f.graph();
    Configuration c(static_cast<std::size_t>(g.node_count() + g.edge_count()));
    for (NodeId x = 0; x < g.node_count(); ++x) c[static_cast<std::size_t>(x)] = f.node(x);
    for (EdgeId e = 0; e < g.edge_count(); ++e) c[static_cast<std::size_t>(g.node_count() + e)] = f.edge(e);
    return c;
}

std::vector<std::pair<double, Configuration>> transitions(const Graph& g, const Configuration& s) {
    const auto nv = static_cast<std::size_t>(g.node_count());
    std::vector<std::pair<double, Configuration>> out;
    for (std::size_t x = 0; x < nv; ++x) {
        if (s[x] == 0) continue;
        const std::int64_t sign = s[x] > 0 ? 1 : -1;
        Configuration next = s;
        // each incident edge gains sign * e_{yx}: -sign along edges leaving x
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            if (g.tail(e) == static_cast<NodeId>(x)) next[nv + static_cast<std::size_t>(e)] -= sign;
            if (g.head(e) == static_cast<NodeId>(x)) next[nv + static_cast<std::size_t>(e)] += sign;
        }
        out.emplace_back(std::abs(static_cast<double>(s[x])) / g.mass(static_cast<NodeId>(x)), std::move(next));
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const std::int64_t c = s[nv + static_cast<std::size_t>(e)];
        if (c == 0) continue;
        const std::int64_t sign = c > 0 ? 1 : -1;
        Configuration next = s;
        const NodeId x = g.tail(e), y = g.head(e);
        if (!g.is_fixed(x)) next[static_cast<std::size_t>(x)] += sign;
        if (!g.is_fixed(y)) next[static_cast<std::size_t>(y)] -= sign;
        out.emplace_back(g.weight(e) * std::abs(static_cast<double>(c)), std::move(next));
    }
    return out;
}

OracleFunctional oracle_node_value(const Graph& g, const Configuration& f0, NodeId x) {
    if (x < 0 || x >= g.node_count()) throw std::invalid_argument("unknown node");
    const double sup0 = sup_norm(f0);
    return {[x](const Configuration& c) { return static_cast<double>(c[static_cast<std::size_t>(x)]); },
            [sup0](std::uint64_t k) { return sup0 + static_cast<double>(k); }};
}

OracleFunctional oracle_edge_value(const Graph& g, const Configuration& f0, EdgeId e) {
    if (e < 0 || e >= g.edge_count()) throw std::invalid_argument("unknown edge");
    const double sup0 = sup_norm(f0);
    const auto i = static_cast<std::size_t>(g.node_count() + e);
    return {[i](const Configuration& c) { return static_cast<double>(c[i]); },
            [sup0](std::uint64_t k) { return sup0 + static_cast<double>(k); }};
}

OracleFunctional oracle_squared_norm(const Graph& g, const Configuration& f0) {
    const double sup0 = sup_norm(f0), l10 = l1_norm(g, f0), Md = g.constants().Md();
    // ||f||_2^2 <= ||f||_1 ||f||_inf
    return {[&g](const Configuration& c) { return squared(g, c); },
            [=](std::uint64_t k) {
                const double kd = static_cast<double>(k);
                return (l10 + Md * kd) * (sup0 + kd);
            }};
}

OracleFunctional oracle_squared_norm_drift(const Graph& g, const Configuration& f0) {
    const double l10 = l1_norm(g, f0), Md = g.constants().Md();
    return {[&g](const Configuration& c) {
                const double base = squared(g, c);
                double s = 0.0;
                for (const auto& [rate, next] : transitions(g, c)) s += rate * (squared(g, next) - base);
                return s;
            },
            // total rate ||f||_1, and one jump moves ||.||_2^2 by at most M d (2 ||f||_inf + 1)
            [=, sup0 = sup_norm(f0)](std::uint64_t k) {
                const double kd = static_cast<double>(k);
                return (l10 + Md * kd) * Md * (2.0 * (sup0 + kd) + 1.0);
            }};
}

GeneratorOracle::GeneratorOracle(const Graph& graph, const ParticleState<Graph>& f0, std::uint64_t jump_cap,
                                 std::size_t max_states)
    : graph_(&graph), initial_(to_configuration(f0)), cap_(jump_cap) {
    if (&f0.graph() != &graph) throw std::invalid_argument("initial state lives on a different graph");
    l1_0_ = l1_norm(graph, initial_);
    std::map<Configuration, std::size_t> index;
    states_.push_back(initial_);
    depth_.push_back(0);
    index.emplace(initial_, 0);
    std::vector<std::vector<std::pair<double, Configuration>>> outgoing;
    for (std::size_t i = 0; i < states_.size(); ++i) {
        auto moves = transitions(graph, states_[i]);
        outgoing.push_back(std::move(moves));
        if (depth_[i] < cap_) {
            for (const auto& [rate, next] : outgoing.back()) {
                if (index.contains(next)) continue;
                if (states_.size() >= max_states)
                    throw StateExplosionError("more than " + std::to_string(max_states) + " states within " +
                                              std::to_string(cap_) + " jumps");
                index.emplace(next, states_.size());
                states_.push_back(next);
                depth_.push_back(depth_[i] + 1);
            }
        }
    }
    const std::size_t n = states_.size();
    row_start_.assign(n + 1, 0);
    exit_rate_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::map<std::size_t, double> merged;
        for (const auto& [rate, next] : outgoing[i]) {
            auto it = index.find(next);
            merged[it == index.end() ? n : it->second] += rate;
            exit_rate_[i] += rate;
        }
        for (const auto& [target, rate] : merged) entries_.push_back({target, rate});
        row_start_[i + 1] = entries_.size();
        lambda_ = std::max(lambda_, exit_rate_[i]);
    }
}

std::span<const GeneratorOracle::Entry> GeneratorOracle::row(std::size_t i) const {
    return {entries_.data() + row_start_.at(i), row_start_[i + 1] - row_start_[i]};
}

namespace {

// Splits [0, t] into pieces with lambda * h <= 20 so the Poisson weights stay representable.
std::size_t pieces(double lambda, double t) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(lambda * t / 20.0)));
}

}  // namespace

std::vector<double> GeneratorOracle::distribution(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
    const std::size_t n = states_.size();
    std::vector<double> p(n + 1, 0.0);
    p[0] = 1.0;
    if (t == 0.0 || lambda_ == 0.0) return p;
    const std::size_t m = pieces(lambda_, t);
    const double mu = lambda_ * t / static_cast<double>(m);
    std::vector<double> v(n + 1), next(n + 1), acc(n + 1);
    for (std::size_t piece = 0; piece < m; ++piece) {
        v = p;
        std::fill(acc.begin(), acc.end(), 0.0);
        double weight = std::exp(-mu), total = 0.0;
        for (std::uint64_t k = 0;; ++k) {
            for (std::size_t j = 0; j <= n; ++j) acc[j] += weight * v[j];
            total += weight;
            if (1.0 - total <= poisson_eps && static_cast<double>(k) > mu) break;
            uniform_step(v, next, exit_rate_, row_start_, entries_, lambda_);
            std::swap(v, next);
            weight *= mu / static_cast<double>(k + 1);
            if (weight == 0.0 && static_cast<double>(k) > mu) break;
        }
        p = acc;
    }
    return p;
}

double GeneratorOracle::uniformization_error(double t) const {
    if (t == 0.0 || lambda_ == 0.0) return 0.0;
    // each piece drops at most poisson_eps of mass, plus rounding in the weights
    return static_cast<double>(pieces(lambda_, t)) * (poisson_eps + 1e-14);
}

double GeneratorOracle::tail_expectation(double t, const std::function<double(std::uint64_t)>& envelope) const {
    // eta_t is dominated by the jump count of a Yule process with rate Md
    // started from r = ceil(||f0||_1 / Md), which is negative binomial:
    // P(k) = C(r+k-1, k) p^r (1-p)^k, p = exp(-Md t).
    if (l1_0_ == 0.0 || t == 0.0) return 0.0;
    const double Md = graph_->constants().Md();
    const double r = std::ceil(l1_0_ / Md - 1e-12);
    const double p = std::exp(-Md * t);
    const double q = 1.0 - p;
    double log_pk = r * std::log(p);
    double sum = 0.0;
    for (std::uint64_t k = 0;; ++k) {
        const double pk = std::exp(log_pk);
        if (k > cap_) {
            const double term = envelope(k) * pk;
            sum += term;
            // polynomial envelopes against a geometric tail: stop once past the mode and negligible
            if (static_cast<double>(k) > 2.0 * r / p + 10.0 && term <= 1e-17 * sum) break;
        }
        log_pk += std::log(q) + std::log((r + static_cast<double>(k)) / static_cast<double>(k + 1));
        if (!std::isfinite(log_pk)) break;
    }
    return sum;
}

double GeneratorOracle::escape_bound(double t) const {
    return tail_expectation(t, [](std::uint64_t) { return 1.0; });
}

std::vector<OracleValue> GeneratorOracle::expectations(double t, std::span<const OracleFunctional> functionals) const {
    const auto p = distribution(t);
    const double poisson = uniformization_error(t);
    std::vector<OracleValue> out;
    for (const auto& fn : functionals) {
        OracleValue v;
        double sup = 0.0;
        for (std::size_t i = 0; i < states_.size(); ++i) {
            const double g = fn.value(states_[i]);
            v.value += p[i] * g;
            sup = std::max(sup, std::abs(g));
        }
        v.truncation_bound = tail_expectation(t, fn.envelope) + poisson * sup;
        out.push_back(v);
    }
    return out;
}

}  // namespace wavegraph
