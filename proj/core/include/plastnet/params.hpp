// Parameter types and the pointwise rate/probability functions shared by the
// whole library: the sigmoid gain, and the exponential pairing kernels.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace plastnet {

// Rates are per millisecond; times are milliseconds; weights are in arbitrary
// units quantised by PlasticityParams::delta_w.

struct NeuronParams {
  double beta = 0.1;     // 1 -> 0 decay rate (1/ms)
  double alpha_m = 0.01; // lower asymptote of the gain (1/ms)
  double s0 = 1.0;       // sigmoid amplitude (1/ms)
  double sigma = 0.3;    // sigmoid slope (1/weight-unit)
  double theta = default_theta(1.0, 0.01, 0.3); // sigmoid threshold (weight units)

  // Threshold placing gain(0) at 2*alpha_m, i.e. ln(s0/alpha_m - 1)/sigma.
  // Requires s0 > alpha_m.
  static double default_theta(double s0, double alpha_m, double sigma) {
    if (!(s0 > alpha_m))
      throw std::invalid_argument("default_theta requires s0 > alpha_m");
    return std::log(s0 / alpha_m - 1.0) / sigma;
  }

  // Supremum of the gain; used as the saturation bound by the stability
  // envelopes. The infimum is alpha_m.
  double alpha_sup() const { return s0 + alpha_m; }

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    if (!(alpha_m > 0.0)) throw std::invalid_argument("alpha_m must be > 0");
    if (!(s0 > 0.0)) throw std::invalid_argument("s0 must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
  }
};

// Bounded nondecreasing firing gain: s0/(1+e^{-sigma(x-theta)}) + alpha_m.
inline double gain(const NeuronParams& p, double x) {
  return p.s0 / (1.0 + std::exp(-p.sigma * (x - p.theta))) + p.alpha_m;
}

struct PlasticityParams {
  double a_plus = 0.8;    // peak potentiation probability, in [0,1]
  double a_minus = 0.7;   // peak depression probability, in [0,1]
  double tau_plus = 17.0; // potentiation kernel decay (ms)
  double tau_minus = 34.0;// depression kernel decay (ms)
  double delta_w = 1.0;   // weight quantum (weight units)
  double epsilon = 0.01;  // slow-timescale scaling, in (0,1]

  void validate() const {
    if (!(a_plus >= 0.0 && a_plus <= 1.0))
      throw std::invalid_argument("a_plus must be in [0,1]");
    if (!(a_minus >= 0.0 && a_minus <= 1.0))
      throw std::invalid_argument("a_minus must be in [0,1]");
    if (!(tau_plus > 0.0)) throw std::invalid_argument("tau_plus must be > 0");
    if (!(tau_minus > 0.0)) throw std::invalid_argument("tau_minus must be > 0");
    if (!(delta_w > 0.0)) throw std::invalid_argument("delta_w must be > 0");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
      throw std::invalid_argument("epsilon must be in (0,1]");
    if (epsilon * a_plus > 1.0 || epsilon * a_minus > 1.0)
      throw std::invalid_argument("epsilon*a_plus and epsilon*a_minus must be <= 1");
  }
};

namespace detail {
inline double pairing_kernel(double amplitude, double tau, double s) {
  if (std::isnan(s) || s < 0.0)
    throw std::invalid_argument("pairing kernel: s must be >= 0 (or +inf)");
  if (std::isinf(s)) return 0.0;
  return amplitude * std::exp(-s / tau);
}
} // namespace detail

// Potentiation probability for a presynaptic age s (ms). p_plus(inf) = 0, so a
// neuron that has never spiked cannot trigger potentiation.
inline double p_plus(const PlasticityParams& p, double s) {
  return detail::pairing_kernel(p.a_plus, p.tau_plus, s);
}

// Depression probability for a postsynaptic age s (ms).
inline double p_minus(const PlasticityParams& p, double s) {
  return detail::pairing_kernel(p.a_minus, p.tau_minus, s);
}

} // namespace plastnet
