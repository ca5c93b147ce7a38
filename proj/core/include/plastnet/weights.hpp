// Integer-quantised synaptic weight matrix. The physical weight of the
// directed connection i -> j is delta_w * k(i, j); the diagonal is zero and
// off-diagonal entries never drop below one quantum.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace plastnet {

class WeightMatrix {
 public:
  WeightMatrix() = default;

  // All off-diagonal entries set to k0 quanta.
  static WeightMatrix uniform(int n, std::int32_t k0 = 1) {
    WeightMatrix w;
    w.init(n, k0);
    return w;
  }

  // Column `col` (incoming weights of that neuron) boosted to k_col quanta,
  // every other off-diagonal entry at k_other. Used by the competition setup.
  static WeightMatrix column_boost(int n, int col, std::int32_t k_col,
                                   std::int32_t k_other = 1) {
    WeightMatrix w;
    w.init(n, k_other);
    if (col < 0 || col >= n) throw std::out_of_range("column_boost: bad column");
    for (int i = 0; i < n; ++i)
      if (i != col) w.set_k(i, col, k_col);
    return w;
  }

  static WeightMatrix from_quanta(int n, std::vector<std::int32_t> k) {
    if (n < 1) throw std::invalid_argument("WeightMatrix: n must be >= 1");
    if (k.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
      throw std::invalid_argument("WeightMatrix: quanta grid has wrong size");
    WeightMatrix w;
    w.n_ = n;
    w.k_ = std::move(k);
    w.validate();
    return w;
  }

  int n() const { return n_; }

  std::int32_t k(int i, int j) const { return k_[idx(i, j)]; }

  void set_k(int i, int j, std::int32_t value) {
    check_entry(i, j, value);
    k_[idx(i, j)] = value;
  }

  // Adds delta quanta to entry (i, j); the result must respect the floor.
  void bump(int i, int j, std::int32_t delta) { set_k(i, j, k(i, j) + delta); }

  const std::vector<std::int32_t>& quanta() const { return k_; }

  // Contiguous row i (outgoing weights of neuron i), length n.
  const std::int32_t* row(int i) const { return k_.data() + idx(i, 0); }

  void validate() const {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) check_entry(i, j, k_[idx(i, j)]);
  }

  bool operator==(const WeightMatrix& other) const {
    return n_ == other.n_ && k_ == other.k_;
  }

 private:
  void init(int n, std::int32_t k0) {
    if (n < 1) throw std::invalid_argument("WeightMatrix: n must be >= 1");
    if (n > 1 && k0 < 1)
      throw std::invalid_argument("WeightMatrix: off-diagonal quanta must be >= 1");
    n_ = n;
    k_.assign(static_cast<std::size_t>(n) * n, k0);
    for (int i = 0; i < n; ++i) k_[idx(i, i)] = 0;
  }

  void check_entry(int i, int j, std::int32_t value) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
      throw std::out_of_range("WeightMatrix: index out of range");
    if (i == j && value != 0)
      throw std::invalid_argument("WeightMatrix: diagonal must stay zero");
    if (i != j && value < 1)
      throw std::invalid_argument("WeightMatrix: off-diagonal quanta must be >= 1");
  }

  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }

  int n_ = 0;
  std::vector<std::int32_t> k_;
};

} // namespace plastnet
