#include "wavegraph/rate_index.hpp"

#include <stdexcept>

namespace wavegraph {

void RateIndex::reserve(std::size_t slots) {
    if (slots > size_) size_ = slots;
    if (slots <= capacity_) return;
    std::size_t cap = capacity_ == 0 ? 1 : capacity_;
    while (cap < slots) cap <<= 1;
    std::vector<double> tree(2 * cap, 0.0);
    for (std::size_t i = 0; i < capacity_; ++i) tree[cap + i] = tree_[capacity_ + i];
    for (std::size_t i = cap - 1; i >= 1; --i) tree[i] = tree[2 * i] + tree[2 * i + 1];
    tree_ = std::move(tree);
    capacity_ = cap;
}

void RateIndex::set(std::size_t slot, double rate) {
    std::size_t i = capacity_ + slot;
    tree_[i] = rate;
    for (i >>= 1; i >= 1; i >>= 1) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

std::size_t RateIndex::sample(double target) const {
    if (!(total() > 0.0)) throw std::logic_error("sampling from an empty rate index");
    std::size_t i = 1;
    while (i < capacity_) {
        const double left = tree_[2 * i];
        if (target < left || !(tree_[2 * i + 1] > 0.0)) {
            i = 2 * i;
        } else {
            target -= left;
            i = 2 * i + 1;
        }
    }
    return i - capacity_;
}

}  // namespace wavegraph
