// Complete binary sum tree over per-neuron jump rates: O(n) bulk rebuild,
// O(log n) rate-proportional selection. A network event changes up to n
// rates at once, so the simulator rebuilds in bulk rather than issuing n
// point updates.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace plastnet {

class SumTree {
 public:
  explicit SumTree(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("SumTree: need at least one leaf");
    size_ = 1;
    while (size_ < static_cast<std::size_t>(n)) size_ <<= 1;
    tree_.assign(2 * size_, 0.0);
  }

  int leaves() const { return n_; }

  void rebuild(const double* rates) {
    double* leaf = tree_.data() + size_;
    for (int i = 0; i < n_; ++i) leaf[i] = rates[i];
    for (std::size_t k = size_ - 1; k >= 1; --k)
      tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
  }

  void update(int i, double rate) {
    std::size_t k = size_ + static_cast<std::size_t>(i);
    tree_[k] = rate;
    for (k >>= 1; k >= 1; k >>= 1) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
  }

  double total() const { return tree_[1]; }

  double leaf(int i) const { return tree_[size_ + static_cast<std::size_t>(i)]; }

  // Select the leaf containing `target` in the cumulative-rate order,
  // target in [0, total()). Roundoff that walks past the populated range
  // falls back to the last strictly positive leaf.
  int sample(double target) const {
    std::size_t k = 1;
    while (k < size_) {
      k <<= 1;
      if (target >= tree_[k]) {
        target -= tree_[k];
        k += 1;
      }
    }
    int idx = static_cast<int>(k - size_);
    if (idx >= n_ || tree_[k] <= 0.0) {
      for (idx = n_ - 1; idx > 0; --idx)
        if (tree_[size_ + static_cast<std::size_t>(idx)] > 0.0) break;
    }
    return idx;
  }

 private:
  int n_;
  std::size_t size_;
  std::vector<double> tree_;
};

} // namespace plastnet
