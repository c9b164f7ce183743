#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "wavegraph/rng.hpp"

namespace wavegraph {

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t replicas = 0;
    std::uint64_t seed = 0;
};

struct ReplicaPlan {
    std::int64_t replicas = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Per-replica statistic vectors, row r belonging to replica r.
class ReplicaTable {
public:
    ReplicaTable(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return cols_ == 0 ? 0 : data_.size() / cols_; }
    std::size_t cols() const { return cols_; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    /// Mean and standard error of column c, reduced pairwise in replica order.
    McEstimate column(std::size_t c, std::uint64_t seed) const;
    /// Same for an arbitrary per-row function of the table.
    McEstimate reduce(const std::function<double(std::span<const double>)>& fn, std::uint64_t seed) const;

private:
    std::size_t cols_;
    std::vector<double> data_;
};

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> xs);

/// Mean and standard error of xs, reduced pairwise in order.
McEstimate summarize(std::span<const double> xs, std::uint64_t seed);

unsigned resolve_threads(unsigned requested);

/// Runs `fn(replica, rng, row)` for every replica on a pool of worker threads.
/// Each replica draws from replica_rng(seed, replica) and writes only its own
/// row, so the table does not depend on the thread count.
template <class Fn>
ReplicaTable run_replicas(const ReplicaPlan& plan, std::size_t cols, Fn&& fn) {
    if (plan.replicas < 2) throw std::invalid_argument("at least two replicas are required");
    const auto R = static_cast<std::size_t>(plan.replicas);
    ReplicaTable table(R, cols);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= R) return;
            try {
                Rng rng = replica_rng(plan.seed, r);
                fn(r, rng, table.row(r));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(R);
                return;
            }
        }
    };
    const unsigned n = std::min<unsigned>(resolve_threads(plan.threads), static_cast<unsigned>(R));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return table;
}

}  // namespace wavegraph
