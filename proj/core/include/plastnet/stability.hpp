// Closed-form envelopes and sufficient-condition checkers for the weight
// process: bounds on stationary quantities of the activity process that hold
// uniformly in the weights, envelopes on the averaged pair rates for
// exponential kernels, and the derived recurrence / transience flags.
//
// Every flag here is *sufficient only*: a false flag never proves the
// opposite behaviour.
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "plastnet/params.hpp"

namespace plastnet {

// Bounds on sum_{v: v^i = 0} mu_v, uniform over weight matrices:
// beta/(alpha_sup + beta) <= . <= beta/(alpha_m + beta).
std::pair<double, double> mu_sum_bounds(const NeuronParams& np);

// Bounds on the stationary joint tail P(S^i > u, V^j = 0), uniform over
// weights: the single-neuron envelope tail at the extreme firing rate times
// the matching occupancy bound. Degenerate rates take the limit branch.
std::pair<double, double> joint_tail_bounds(const NeuronParams& np, double u);

// Envelopes on the averaged potentiation/depression rates for exponential
// pairing kernels, uniform over weights.
struct RateEnvelopes {
  double plus_lower = 0.0, plus_upper = 0.0;
  double minus_lower = 0.0, minus_upper = 0.0;
};
RateEnvelopes rate_envelopes(const NeuronParams& np, const PlasticityParams& pp);

// Scalar sufficient condition for positive recurrence of every pair weight:
// flag = (ratio < 1), where ratio is algebraically r_upper(+)/r_lower(-).
struct RecurrenceCondition {
  double ratio = 0.0;
  bool recurrent_sufficient = false;
};
RecurrenceCondition recurrence_condition(const NeuronParams& np,
                                         const PlasticityParams& pp);

// A pairing kernel presented for numerical tail analysis. The declarations
// cannot be checked from the callable alone; a kernel not declared
// eventually monotone yields a conservative `false`.
struct KernelProbe {
  std::function<double(double)> fn;
  double limit_at_inf = 0.0;
  bool eventually_monotone = false;
};

// Sufficient condition for transience of a pair weight: p+(s) - p-(s) > gamma
// for all s >= 0, checked as an infimum over a log-spaced grid plus the
// declared limits. Exponential pairs always fail (the difference vanishes).
bool transience_condition(const KernelProbe& plus, const KernelProbe& minus,
                          double gamma, double s_max = 1e4,
                          int grid_points = 4096);
bool transience_condition(const PlasticityParams& pp, double gamma);

// Everything above in one report (tail envelopes evaluated on a u-grid).
struct BoundsReport {
  double mu_sum_lower = 0.0, mu_sum_upper = 0.0;
  std::vector<double> u_grid;
  std::vector<double> tail_lower, tail_upper;
  RateEnvelopes envelopes;
  double condition_ratio = 0.0;
  bool recurrent_sufficient = false;
  bool transient_sufficient = false;
  double gamma = 0.0;
};
BoundsReport make_bounds_report(const NeuronParams& np, const PlasticityParams& pp,
                                const std::vector<double>& u_grid, double gamma);

} // namespace plastnet
