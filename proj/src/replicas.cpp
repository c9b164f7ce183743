#include "wavegraph/replicas.hpp"

#include <algorithm>

namespace wavegraph {

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

McEstimate summarize(std::span<const double> xs, std::uint64_t seed) {
    McEstimate m;
    m.replicas = static_cast<std::int64_t>(xs.size());
    m.seed = seed;
    if (xs.empty()) return m;
    const double n = static_cast<double>(xs.size());
    m.estimate = pairwise_sum(xs) / n;
    if (xs.size() < 2) return m;
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m.estimate) * (xs[i] - m.estimate);
    m.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
    return m;
}

McEstimate ReplicaTable::column(std::size_t c, std::uint64_t seed) const {
    std::vector<double> xs(rows());
    for (std::size_t r = 0; r < xs.size(); ++r) xs[r] = at(r, c);
    return summarize(xs, seed);
}

McEstimate ReplicaTable::reduce(const std::function<double(std::span<const double>)>& fn,
                                std::uint64_t seed) const {
    std::vector<double> xs(rows());
    for (std::size_t r = 0; r < xs.size(); ++r) xs[r] = fn(row(r));
    return summarize(xs, seed);
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace wavegraph
