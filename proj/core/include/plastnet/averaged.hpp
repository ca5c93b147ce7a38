// Slow-timescale weight dynamics: per-pair potentiation/depression rates
// averaged over the stationary activity law at frozen weights, the induced
// drift field, an exact jump-chain simulator on the weight lattice, the
// two-neuron birth-death reduction, and the saturated drift envelope.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "plastnet/fast.hpp"

namespace plastnet {

// Pairwise averaged transition rates of the weight process on its rescaled
// clock (one unit = 1/epsilon of process time). Row-major [i*n + j] for the
// ordered pair (i, j); diagonals are zero.
struct AveragedRates {
  int n = 0;
  std::vector<double> r_plus;  // rate of K[i][j] -> K[i][j] + 1
  std::vector<double> r_minus; // rate of K[i][j] -> K[i][j] - 1 (when > floor)

  double plus(int i, int j) const { return r_plus[static_cast<std::size_t>(i) * n + j]; }
  double minus(int i, int j) const { return r_minus[static_cast<std::size_t>(i) * n + j]; }
};

AveragedRates averaged_rates(FastAnalytics& fa, const WeightMatrix& w);

// Expected weight velocity (r_plus - r_minus) * delta_w per ordered pair.
struct DriftField {
  int n = 0;
  std::vector<double> eta; // row-major, diagonal zero
  double at(int i, int j) const { return eta[static_cast<std::size_t>(i) * n + j]; }
};

DriftField drift_field(FastAnalytics& fa, const WeightMatrix& w);

// ---------------------------------------------------------------------------
// Jump-chain simulation on the weight lattice

struct AveragedEvent {
  double t = 0.0; // rescaled time of the jump
  int i = 0, j = 0;
  int delta = 0; // +1 or -1 quanta on K[i][j]
};

struct AveragedConfig {
  std::uint64_t seed = 1;
  double horizon = 0.0; // rescaled time units
  std::uint64_t max_events = UINT64_MAX;
  std::vector<std::pair<int, int>> frozen_pairs; // (i, j) never updated
  bool record_events = true;
};

struct AveragedResult {
  WeightMatrix final_w{WeightMatrix::uniform(2, 1)};
  double t_end = 0.0;
  std::uint64_t events = 0;
  std::vector<AveragedEvent> trajectory;
};

// Rates may be injected (e.g. constant-rate test harnesses); the default
// provider evaluates averaged_rates through the shared analytics cache.
using RateProvider = std::function<AveragedRates(const WeightMatrix&)>;

AveragedResult simulate_averaged(const RateProvider& rates, WeightMatrix w0,
                                 const AveragedConfig& cfg);
AveragedResult simulate_averaged(FastAnalytics& fa, WeightMatrix w0,
                                 const AveragedConfig& cfg);

// ---------------------------------------------------------------------------
// Two-neuron birth-death reduction: K[0][1] moves, K[1][0] is frozen.

enum class BirthDeathKind { ergodic, transient, inconclusive };

struct BirthDeathResult {
  BirthDeathKind classification = BirthDeathKind::inconclusive;
  int k_sat = 0;              // first level with saturated gain
  double r_plus_sat = 0.0;    // R+ : birth rate beyond saturation
  double r_minus_sat = 0.0;   // R- : death rate beyond saturation
  int k_max = 0;              // truncation level of the level curves
  std::vector<double> r_plus;  // r_plus[k-1]  = birth rate at level k, k = 1..k_max
  std::vector<double> r_minus; // r_minus[k-1] = death rate at level k
  std::vector<double> theta;   // stationary law on 1..k_max (ergodic case only)
  double tail_bound = 0.0;     // bound on stationary mass above k_max
};

// frozen_quanta: value of K[1][0]; k_max: truncation level (>= 10). The level
// curves are always extended to cover the saturation level internally.
BirthDeathResult bd_classify(FastAnalytics& fa, int frozen_quanta, int k_max = 200);

// ---------------------------------------------------------------------------
// Saturated drift envelope for the two-neuron system

// Supremum of the (1 -> 2) drift over the two saturation regimes: one of the
// cross rates pinned at the gain ceiling, the other swept over a grid of
// achievable values. Used to read off whether unbounded mutual growth is
// possible at all for the given kernel parameters.
struct DriftLimitReport {
  double sup_eta = 0.0;
  double alpha_at_sup = 0.0; // swept rate at the supremum
  int branch_at_sup = 0;     // 0: forward rate pinned; 1: reverse rate pinned
  std::vector<double> alpha_grid;
  std::vector<double> eta_pinned_forward; // alpha_{2 on | 1 active} = ceiling
  std::vector<double> eta_pinned_reverse; // alpha_{1 on | 2 active} = ceiling
};

DriftLimitReport limit_sup_drift(const NeuronParams& np, const PlasticityParams& pp,
                                 int grid_points = 257);

} // namespace plastnet
