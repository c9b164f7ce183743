#pragma once

#include <cstddef>
#include <vector>

namespace wavegraph {

/// Sum tree over per-slot rates: O(log n) update and proportional sampling.
///
/// Internal nodes are always recomputed from their children, so the root
/// never accumulates rounding drift across updates.
class RateIndex {
public:
    RateIndex() = default;
    explicit RateIndex(std::size_t slots) { reserve(slots); }

    std::size_t size() const { return size_; }
    double total() const { return tree_.size() > 1 ? tree_[1] : 0.0; }
    double rate(std::size_t slot) const { return tree_[capacity_ + slot]; }

    /// Makes room for at least `slots` slots; new slots start at rate 0.
    void reserve(std::size_t slots);
    void set(std::size_t slot, double rate);

    /// Slot whose cumulative interval contains `target`, for target in [0, total()).
    /// Never returns a zero-rate slot while total() > 0.
    std::size_t sample(double target) const;

private:
    std::size_t capacity_ = 0;
    std::size_t size_ = 0;
    std::vector<double> tree_;
};

}  // namespace wavegraph
