#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavegraph/particle_state.hpp"
#include "wavegraph/rng.hpp"

namespace wavegraph {

struct EventRecord {
    std::uint64_t index = 0;  // n, counted from 1
    double time = 0.0;        // tau_n
    double wait = 0.0;        // xi_n = tau_n - tau_{n-1}
    EntityKind kind = EntityKind::node;
    std::int64_t id = 0;
    int sign = 0;
};

/// Raised when a run exceeds its jump budget. The process is non-explosive,
/// so this always points at a defect rather than at the dynamics.
class ExplosionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationOptions {
    std::uint64_t max_jumps = 1'000'000'000;
    /// Verify per-jump locality, rate-cache consistency and frozen V1 values
    /// after every jump (O(support) per jump; meant for tests).
    bool check_invariants = false;
};

struct SimulationSummary {
    std::uint64_t jumps = 0;  // eta_T
    double final_time = 0.0;
};

/// Observer that ignores everything.
struct NullObserver {
    template <class S>
    void on_interval(const S&, double, double, bool) {}
    template <class S>
    void on_event(const EventRecord&, const S&) {}
};

/// General-purpose observer: exact time integrals of watched node values,
/// state callbacks at fixed sample times, and an optional per-event hook.
///
/// Samples see the right-continuous state, i.e. all jumps at or before the
/// sample time.
template <class G>
class Observer {
public:
    using State = ParticleState<G>;
    using SampleFn = std::function<void(std::size_t, double, const State&)>;
    using EventFn = std::function<void(const EventRecord&, const State&)>;

    std::size_t watch_node(NodeId x) {
        watched_.push_back(x);
        integrals_.push_back(0.0);
        return watched_.size() - 1;
    }
    double integral(std::size_t i) const { return integrals_[i]; }
    const std::vector<double>& integrals() const { return integrals_; }

    /// Times must be sorted ascending.
    void sample_at(std::vector<double> times, SampleFn fn) {
        if (!std::is_sorted(times.begin(), times.end())) throw std::invalid_argument("sample times must be sorted");
        sample_times_ = std::move(times);
        next_sample_ = 0;
        on_sample_ = std::move(fn);
    }
    void on_event(EventFn fn) { on_event_ = std::move(fn); }

    std::uint64_t jumps() const { return jumps_; }

    void on_interval(const State& s, double t0, double t1, bool closed) {
        for (std::size_t i = 0; i < watched_.size(); ++i) {
            integrals_[i] += static_cast<double>(s.node(watched_[i])) * (t1 - t0);
        }
        while (next_sample_ < sample_times_.size()) {
            double ts = sample_times_[next_sample_];
            if (ts < t1 || (closed && ts <= t1)) {
                if (on_sample_) on_sample_(next_sample_, ts, s);
                ++next_sample_;
            } else {
                break;
            }
        }
    }
    void on_event(const EventRecord& ev, const State& s) {
        jumps_ = ev.index;
        if (on_event_) on_event_(ev, s);
    }

private:
    std::vector<NodeId> watched_;
    std::vector<double> integrals_;
    std::vector<double> sample_times_;
    std::size_t next_sample_ = 0;
    SampleFn on_sample_;
    EventFn on_event_;
    std::uint64_t jumps_ = 0;
};

/// One realization of the IPS: a state plus its clock and jump counter.
template <class G>
class Trajectory {
public:
    using State = ParticleState<G>;

    explicit Trajectory(State initial, SimulationOptions options = {})
        : state_(std::move(initial)), options_(options) {}

    const State& state() const { return state_; }
    double time() const { return time_; }
    std::uint64_t jumps() const { return jumps_; }

    /// Performs the next jump. Throws on an absorbing state.
    EventRecord step(Rng& rng) {
        if (state_.absorbing()) throw std::logic_error("step called on an absorbing state");
        double wait = exponential(rng, state_.total_rate());
        return jump(wait, rng);
    }

    /// Runs until the next jump would land after T; closes the observer's
    /// last constancy interval at T.
    template <class Obs = NullObserver>
    SimulationSummary simulate(double T, Obs& observer, Rng& rng) {
        if (!(T >= time_)) throw std::invalid_argument("simulation horizon precedes the current time");
        std::uint64_t start = jumps_;
        while (!state_.absorbing()) {
            double wait = exponential(rng, state_.total_rate());
            if (time_ + wait > T) break;
            if (jumps_ - start >= options_.max_jumps)
                throw ExplosionError("jump budget of " + std::to_string(options_.max_jumps) +
                                     " exceeded before t = " + std::to_string(T));
            observer.on_interval(state_, time_, time_ + wait, false);
            EventRecord ev = jump(wait, rng);
            observer.on_event(ev, state_);
        }
        observer.on_interval(state_, time_, T, true);
        time_ = T;
        return {jumps_, T};
    }

    SimulationSummary simulate(double T, Rng& rng) {
        NullObserver none;
        return simulate(T, none, rng);
    }

private:
    EventRecord jump(double wait, Rng& rng) {
        const double target = uniform_open(rng) * state_.total_rate();
        const std::size_t slot = state_.rates().sample(target);
        const Entity ent = state_.entity(slot);
        const std::int64_t v = state_.value(slot);
        const int s = v > 0 ? 1 : -1;

        Snapshot before;
        if (options_.check_invariants) before = snapshot();

        const G& g = state_.graph();
        if (ent.kind == EntityKind::node) {
            // f += sgn(f(z)) sum_{y~z} delta_{yz}: every incident edge gains s e_{yz}
            g.for_each_incident(ent.id, [&](const Incidence& inc) {
                state_.add(state_.edge_slot(inc.edge), inc.outgoing ? -s : s);
            });
        } else {
            // f += sgn(c) (hat delta_x - hat delta_y) along the canonical (x, y)
            const NodeId x = g.tail(ent.id);
            const NodeId y = g.head(ent.id);
            if (!g.is_fixed(x)) state_.add(state_.node_slot(x), s);
            if (!g.is_fixed(y)) state_.add(state_.node_slot(y), -s);
        }
        time_ += wait;
        ++jumps_;
        if (options_.check_invariants) verify(before);
        return {jumps_, time_, wait, ent.kind, ent.id, s};
    }

    struct Snapshot {
        std::vector<std::int64_t> values;
        double l1 = 0.0;
        double linf = 0.0;
    };

    Snapshot snapshot() const {
        Snapshot s;
        s.values.resize(state_.slot_count());
        for (std::size_t i = 0; i < state_.slot_count(); ++i) s.values[i] = state_.value(i);
        s.l1 = state_.recompute_l1();
        s.linf = norm_alpha(state_, std::numeric_limits<double>::infinity());
        return s;
    }

    void verify(const Snapshot& before) const {
        const G& g = state_.graph();
        auto fail = [](const std::string& what) { throw std::logic_error("IPS invariant violated: " + what); };
        for (std::size_t i = 0; i < state_.slot_count(); ++i) {
            std::int64_t old = i < before.values.size() ? before.values[i] : 0;
            std::int64_t now = state_.value(i);
            if (std::abs(now - old) > 1) fail("a coordinate moved by more than one");
            Entity e = state_.entity(i);
            if (e.kind == EntityKind::node && g.is_fixed(e.id) && now != old) fail("a V1 value changed");
        }
        const double l1 = state_.recompute_l1();
        const double Md = g.constants().Md();
        if (l1 - before.l1 > Md * (1.0 + 1e-12) + 1e-9) fail("l1 norm grew by more than Md");
        const double linf = norm_alpha(state_, std::numeric_limits<double>::infinity());
        if (linf - before.linf > 1.0) fail("sup norm grew by more than one");
        const double cached = state_.total_rate();
        if (std::abs(cached - l1) > 1e-9 * std::max(1.0, l1)) fail("cached total rate differs from ||f||_1");
    }

    State state_;
    SimulationOptions options_;
    double time_ = 0.0;
    std::uint64_t jumps_ = 0;
};

/// Runs a fresh trajectory from `initial` up to time T.
template <class G, class Obs = NullObserver>
SimulationSummary simulate(ParticleState<G>& state, double T, Obs& observer, Rng& rng,
                           SimulationOptions options = {}) {
    Trajectory<G> traj(std::move(state), options);
    auto summary = traj.simulate(T, observer, rng);
    state = traj.state();
    return summary;
}

/// Jump count of a Yule process started from r with per-individual birth
/// rate lambda, observed at time T.
std::uint64_t yule_simulate(double lambda, std::int64_t r, double T, Rng& rng);

}  // namespace wavegraph
