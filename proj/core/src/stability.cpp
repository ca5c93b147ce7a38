#include "plastnet/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plastnet/fast.hpp"

namespace plastnet {

namespace {

// Stationary mean of e^{-S/tau} for an isolated neuron with rates (alpha,
// beta). Product form of 1 - [a^2/(tb+1) - b^2/(ta+1)]/(a^2 - b^2); the two
// are algebraically identical, but this one stays finite through alpha =
// beta, so it *is* the limit branch.
double age_transform_factor(double alpha, double beta, double tau) {
  return tau * alpha * beta * (tau * (alpha + beta) + 1.0) /
         ((alpha + beta) * (tau * beta + 1.0) * (tau * alpha + 1.0));
}

} // namespace

std::pair<double, double> mu_sum_bounds(const NeuronParams& np) {
  np.validate();
  return {np.beta / (np.alpha_sup() + np.beta),
          np.beta / (np.alpha_m + np.beta)};
}

std::pair<double, double> joint_tail_bounds(const NeuronParams& np, double u) {
  np.validate();
  if (!(u >= 0.0)) throw std::invalid_argument("joint_tail_bounds: u must be >= 0");
  const double a_sup = np.alpha_sup();
  const double lower =
      SingleNeuronLaw(a_sup, np.beta).tail(u) * np.beta / (a_sup + np.beta);
  const double upper =
      SingleNeuronLaw(np.alpha_m, np.beta).tail(u) * np.beta / (np.alpha_m + np.beta);
  return {lower, upper};
}

RateEnvelopes rate_envelopes(const NeuronParams& np, const PlasticityParams& pp) {
  np.validate();
  pp.validate();
  const double am = np.alpha_m, aM = np.alpha_sup(), b = np.beta;
  RateEnvelopes e;
  e.plus_lower = pp.a_plus * am * b / (aM + b) * age_transform_factor(am, b, pp.tau_plus);
  e.plus_upper = pp.a_plus * aM * b / (am + b) * age_transform_factor(aM, b, pp.tau_plus);
  e.minus_lower = pp.a_minus * am * b / (aM + b) * age_transform_factor(am, b, pp.tau_minus);
  e.minus_upper = pp.a_minus * aM * b / (am + b) * age_transform_factor(aM, b, pp.tau_minus);
  return e;
}

RecurrenceCondition recurrence_condition(const NeuronParams& np,
                                         const PlasticityParams& pp) {
  np.validate();
  pp.validate();
  const double am = np.alpha_m, aM = np.alpha_sup(), b = np.beta;
  const double tp = pp.tau_plus, tm = pp.tau_minus;
  RecurrenceCondition rc;
  rc.ratio = (aM * aM * pp.a_plus * tp * (aM * tp + b * tp + 1.0) *
              (tm * am + 1.0) * (tm * b + 1.0)) /
             (am * am * pp.a_minus * tm * (am * tm + b * tm + 1.0) *
              (tp * aM + 1.0) * (tp * b + 1.0));
  rc.recurrent_sufficient = rc.ratio < 1.0;
  return rc;
}

bool transience_condition(const KernelProbe& plus, const KernelProbe& minus,
                          double gamma, double s_max, int grid_points) {
  if (!(gamma > 0.0)) throw std::invalid_argument("transience_condition: gamma must be > 0");
  if (!plus.fn || !minus.fn)
    throw std::invalid_argument("transience_condition: missing kernel callable");
  if (!(s_max > 0.0) || grid_points < 2)
    throw std::invalid_argument("transience_condition: bad grid");

  // Without a monotone tail the grid proves nothing beyond s_max.
  if (!plus.eventually_monotone || !minus.eventually_monotone) return false;
  if (!(plus.limit_at_inf - minus.limit_at_inf > gamma)) return false;

  auto diff = [&](double s) { return plus.fn(s) - minus.fn(s); };
  if (!(diff(0.0) > gamma)) return false;
  // Log-spaced interior grid from s_max * 1e-9 up to s_max.
  const double lo = std::log(s_max * 1e-9), hi = std::log(s_max);
  for (int g = 0; g < grid_points; ++g) {
    const double s = std::exp(lo + (hi - lo) * g / (grid_points - 1));
    if (!(diff(s) > gamma)) return false;
  }
  return true;
}

bool transience_condition(const PlasticityParams& pp, double gamma) {
  pp.validate();
  KernelProbe plus{[&pp](double s) { return p_plus(pp, s); }, 0.0, true};
  KernelProbe minus{[&pp](double s) { return p_minus(pp, s); }, 0.0, true};
  return transience_condition(plus, minus, gamma);
}

BoundsReport make_bounds_report(const NeuronParams& np, const PlasticityParams& pp,
                                const std::vector<double>& u_grid, double gamma) {
  BoundsReport rep;
  const auto ms = mu_sum_bounds(np);
  rep.mu_sum_lower = ms.first;
  rep.mu_sum_upper = ms.second;
  rep.u_grid = u_grid;
  rep.tail_lower.reserve(u_grid.size());
  rep.tail_upper.reserve(u_grid.size());
  for (double u : u_grid) {
    const auto tb = joint_tail_bounds(np, u);
    rep.tail_lower.push_back(tb.first);
    rep.tail_upper.push_back(tb.second);
  }
  rep.envelopes = rate_envelopes(np, pp);
  const auto rc = recurrence_condition(np, pp);
  rep.condition_ratio = rc.ratio;
  rep.recurrent_sufficient = rc.recurrent_sufficient;
  rep.gamma = gamma;
  rep.transient_sufficient = transience_condition(pp, gamma);
  return rep;
}

} // namespace plastnet
