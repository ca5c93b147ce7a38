// Dense linear-algebra pipeline for a frozen weight matrix: the stationary
// distribution mu of the activity process, and the Laplace transforms of the
// conditional spike-age laws solved from triangular-plus-dominant linear
// systems. Exponential in N by construction; guarded by caps.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "plastnet/spin.hpp"
#include "plastnet/weights.hpp"

namespace plastnet {

// Thrown when a solve comes back with an unusable result (residual too large,
// lost positivity, broken diagonal dominance). Maps to CLI exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Process-wide counters for the invariants every assembled system must
// satisfy. The property/acceptance suites reset them, run, and require
// violation counts of zero (violations also throw NumericalError).
struct SolverDiagnostics {
  std::uint64_t systems_built = 0;
  std::uint64_t dominance_violations = 0;
  std::uint64_t value_range_violations = 0;
  double min_dominance_margin = 0.0; // over rows of all systems since reset()
  bool any = false;

  void reset() { *this = SolverDiagnostics{}; }
  static SolverDiagnostics& instance();
};

// Stationary distribution of the activity chain in enumeration order:
// solves Q^T mu = 0 with sum(mu) = 1 and verifies residual and positivity.
std::vector<double> solve_mu(const RateTable& rt, const SpinEnumeration& sp);

// L(pi_v) along a single axis: lambda on coordinate `axis` (0-based), zero
// elsewhere. Returns one value per state in enumeration order. lambda = 0
// short-circuits to the all-ones vector.
std::vector<double> laplace_axis(const RateTable& rt, const SpinEnumeration& sp,
                                 const std::vector<double>& mu, int axis,
                                 double lambda);

// L(pi_v) at a full nonnegative vector lambda, evaluated by the recursion
// over coordinate-zeroed subsets (memoised); bottoms out at the all-zero
// point. Exponential in the number of strictly positive coordinates; capped.
std::vector<double> laplace_general(const RateTable& rt, const SpinEnumeration& sp,
                                    const std::vector<double>& mu,
                                    const std::vector<double>& lambda,
                                    int cap = 4);

// Closed-form stationary law of a single isolated neuron with up-rate alpha
// and down-rate beta, including the alpha = beta degenerate branch
// (threshold 1e-9 relative).
class SingleNeuronLaw {
 public:
  SingleNeuronLaw(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  bool degenerate() const { return degenerate_; }

  double occupancy_on() const { return alpha_ / (alpha_ + beta_); }

  // Conditional spike-age densities given V = 0 / V = 1.
  double density0(double s) const;
  double density1(double s) const;

  // Unconditional stationary tail P(S > u).
  double tail(double u) const;

  // Conditional Laplace transforms E[e^{-lambda S} | V = v].
  double laplace0(double lambda) const;
  double laplace1(double lambda) const;

 private:
  double alpha_, beta_;
  bool degenerate_;
};

inline SingleNeuronLaw single_neuron_closed(double alpha, double beta) {
  return SingleNeuronLaw(alpha, beta);
}

// Compute-on-demand cache of per-weight-matrix solves. The averaged-process
// simulator revisits weight states constantly; entries are evicted LRU.
// Single-writer: share one instance per thread, or guard externally.
class FastAnalytics {
 public:
  FastAnalytics(const NeuronParams& np, const PlasticityParams& pp,
                int dense_cap = 12, std::size_t cache_capacity = 4096);
  ~FastAnalytics();

  const NeuronParams& neuron_params() const { return np_; }
  const PlasticityParams& plasticity_params() const { return pp_; }
  int dense_cap() const { return dense_cap_; }

  const SpinEnumeration& enumeration(int n);

  // Value-returning accessors (entries can be evicted; no references leak).
  RateTable rates(const WeightMatrix& w);
  std::vector<double> mu(const WeightMatrix& w);
  std::vector<double> laplace_axis_values(const WeightMatrix& w, int axis,
                                          double lambda);

  std::uint64_t cache_hits() const { return hits_; }
  std::uint64_t cache_misses() const { return misses_; }

 private:
  struct Entry;
  Entry& entry(const WeightMatrix& w);

  NeuronParams np_;
  PlasticityParams pp_;
  int dense_cap_;
  std::size_t capacity_;
  std::uint64_t hits_ = 0, misses_ = 0;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace plastnet
