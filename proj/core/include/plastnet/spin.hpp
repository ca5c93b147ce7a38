// Enumeration of the 2^N activity vectors and the per-state jump-rate table
// used by the dense linear-algebra pipeline. States are ordered by ascending
// active count with lexicographic tie-breaking (v^1 most significant), so
// every up-jump leads to a strictly later state and every down-jump to a
// strictly earlier one.
#pragma once

#include <cstdint>
#include <vector>

#include "plastnet/params.hpp"
#include "plastnet/weights.hpp"

namespace plastnet {

class SpinEnumeration {
 public:
  // Guarded well above the dense-solver cap; the table itself is O(2^n).
  explicit SpinEnumeration(int n);

  int n() const { return n_; }
  int size() const { return static_cast<int>(masks_.size()); }

  // Bit i of the mask is neuron i's activity (0-based).
  std::uint32_t mask(int index) const { return masks_[static_cast<std::size_t>(index)]; }
  int index(std::uint32_t mask) const { return index_[mask]; }

  int active_count(int index) const;
  bool active(int index, int neuron) const {
    return (masks_[static_cast<std::size_t>(index)] >> neuron) & 1u;
  }

  // "v^1 v^2 ... v^N" rendering, e.g. "01" for (v1,v2) = (0,1).
  std::string bitstring(int index) const;

 private:
  int n_ = 0;
  std::vector<std::uint32_t> masks_;  // position -> mask
  std::vector<int> index_;            // mask -> position
};

// Up-jump rates for every (state, inactive neuron) pair plus the shared down
// rate. This is the whole input of the spin-process and Laplace solvers; it
// can be built from a weight matrix or assembled directly (the limiting-drift
// analysis substitutes saturated rates by hand).
struct RateTable {
  int n = 0;
  double beta = 0.0;
  // up[state * n + i] = rate of neuron i's 0->1 jump in that state; only
  // entries with v_i = 0 are meaningful (others are set to 0).
  std::vector<double> up;

  double up_rate(int state, int neuron) const {
    return up[static_cast<std::size_t>(state) * n + neuron];
  }
};

// Rate table of the network (enumeration order of `sp`).
RateTable make_rate_table(const NeuronParams& np, const WeightMatrix& w,
                          double delta_w, const SpinEnumeration& sp);

} // namespace plastnet
