#include "plastnet/averaged.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "plastnet/rng.hpp"

namespace plastnet {

namespace {

// Shared assembly: fold the stationary law, the per-state firing rates and
// the axis transforms into pairwise potentiation/depression rates.
AveragedRates assemble_rates(
    const RateTable& rt, const SpinEnumeration& sp, const std::vector<double>& mu,
    const PlasticityParams& pp,
    const std::function<std::vector<double>(int, double)>& axis_values) {
  const int n = sp.n();
  AveragedRates out;
  out.n = n;
  out.r_plus.assign(static_cast<std::size_t>(n) * n, 0.0);
  out.r_minus.assign(static_cast<std::size_t>(n) * n, 0.0);

  std::vector<std::vector<double>> lam_plus(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> lam_minus(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    lam_plus[static_cast<std::size_t>(i)] = axis_values(i, 1.0 / pp.tau_plus);
    lam_minus[static_cast<std::size_t>(i)] = axis_values(i, 1.0 / pp.tau_minus);
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double rp = 0.0, rm = 0.0;
      for (int v = 0; v < sp.size(); ++v) {
        // Potentiation of (i, j): j spikes while i's age transform damps the
        // pairing window; only states with j inactive can fire j.
        if (!sp.active(v, j))
          rp += mu[static_cast<std::size_t>(v)] * rt.up_rate(v, j) *
                lam_plus[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)];
        // Depression of (i, j): i spikes against j's age window.
        if (!sp.active(v, i))
          rm += mu[static_cast<std::size_t>(v)] * rt.up_rate(v, i) *
                lam_minus[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)];
      }
      out.r_plus[static_cast<std::size_t>(i) * n + j] = pp.a_plus * rp;
      out.r_minus[static_cast<std::size_t>(i) * n + j] = pp.a_minus * rm;
    }
  }
  return out;
}

} // namespace

AveragedRates averaged_rates(FastAnalytics& fa, const WeightMatrix& w) {
  const SpinEnumeration& sp = fa.enumeration(w.n());
  const RateTable rt = fa.rates(w);
  const std::vector<double> mu = fa.mu(w);
  return assemble_rates(rt, sp, mu, fa.plasticity_params(),
                        [&](int axis, double lambda) {
                          return fa.laplace_axis_values(w, axis, lambda);
                        });
}

DriftField drift_field(FastAnalytics& fa, const WeightMatrix& w) {
  const AveragedRates r = averaged_rates(fa, w);
  DriftField f;
  f.n = r.n;
  f.eta.assign(r.r_plus.size(), 0.0);
  const double dw = fa.plasticity_params().delta_w;
  for (std::size_t k = 0; k < r.r_plus.size(); ++k)
    f.eta[k] = (r.r_plus[k] - r.r_minus[k]) * dw;
  return f;
}

AveragedResult simulate_averaged(const RateProvider& rates, WeightMatrix w0,
                                 const AveragedConfig& cfg) {
  const int n = w0.n();
  if (!(cfg.horizon >= 0.0) || !std::isfinite(cfg.horizon))
    throw std::invalid_argument("simulate_averaged: bad horizon");

  std::vector<std::uint8_t> frozen(static_cast<std::size_t>(n) * n, 0);
  for (auto [i, j] : cfg.frozen_pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw std::invalid_argument("simulate_averaged: bad frozen pair");
    frozen[static_cast<std::size_t>(i) * n + j] = 1;
  }

  Xoshiro256pp rng(cfg.seed);
  AveragedResult res;
  res.final_w = w0;
  double t = 0.0;

  while (res.events < cfg.max_events) {
    const AveragedRates r = rates(res.final_w);
    if (r.n != n) throw std::invalid_argument("rate provider dimension mismatch");

    double total = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j || frozen[static_cast<std::size_t>(i) * n + j]) continue;
        total += r.plus(i, j);
        if (res.final_w.k(i, j) > 1) total += r.minus(i, j);
      }
    if (total <= 0.0) { t = cfg.horizon; break; }

    t += rng.exponential(total);
    if (t >= cfg.horizon) { t = cfg.horizon; break; }

    // Channel selection by cumulative scan in fixed (i, j, +/-) order.
    double target = rng.uniform01() * total;
    int si = -1, sj = -1, sd = 0;
    for (int i = 0; i < n && sd == 0; ++i)
      for (int j = 0; j < n && sd == 0; ++j) {
        if (i == j || frozen[static_cast<std::size_t>(i) * n + j]) continue;
        target -= r.plus(i, j);
        if (target < 0.0) { si = i; sj = j; sd = +1; break; }
        if (res.final_w.k(i, j) > 1) {
          target -= r.minus(i, j);
          if (target < 0.0) { si = i; sj = j; sd = -1; break; }
        }
      }
    if (sd == 0) { // roundoff fell off the end: take the last open channel
      for (int i = n - 1; i >= 0 && sd == 0; --i)
        for (int j = n - 1; j >= 0 && sd == 0; --j) {
          if (i == j || frozen[static_cast<std::size_t>(i) * n + j]) continue;
          si = i; sj = j;
          sd = (res.final_w.k(i, j) > 1) ? -1 : +1;
        }
      if (sd == 0) throw NumericalError("channel selection failed");
    }

    res.final_w.bump(si, sj, sd);
    ++res.events;
    if (cfg.record_events)
      res.trajectory.push_back(AveragedEvent{t, si, sj, sd});
  }

  res.t_end = t;
  return res;
}

AveragedResult simulate_averaged(FastAnalytics& fa, WeightMatrix w0,
                                 const AveragedConfig& cfg) {
  return simulate_averaged(
      [&fa](const WeightMatrix& w) { return averaged_rates(fa, w); },
      std::move(w0), cfg);
}

// ---------------------------------------------------------------------------

BirthDeathResult bd_classify(FastAnalytics& fa, int frozen_quanta, int k_max) {
  if (frozen_quanta < 1) throw std::invalid_argument("bd_classify: frozen weight < 1");
  if (k_max < 10) throw std::invalid_argument("bd_classify: k_max must be >= 10");
  const NeuronParams& np = fa.neuron_params();
  const PlasticityParams& pp = fa.plasticity_params();
  const double alpha_sup = np.alpha_sup();

  // First level whose gain is saturated to 1e-6 relative.
  const double sat_tol = 1e-6 * alpha_sup;
  int k_sat = 1;
  while (std::abs(gain(np, k_sat * pp.delta_w) - alpha_sup) >= sat_tol) {
    if (++k_sat > 10'000'000)
      throw NumericalError("bd_classify: gain never saturates");
  }

  BirthDeathResult res;
  res.k_sat = k_sat;
  res.k_max = std::max(k_max, k_sat);
  res.r_plus.resize(static_cast<std::size_t>(res.k_max));
  res.r_minus.resize(static_cast<std::size_t>(res.k_max));
  for (int k = 1; k <= res.k_max; ++k) {
    const WeightMatrix w =
        WeightMatrix::from_quanta(2, {0, k, frozen_quanta, 0});
    const AveragedRates r = averaged_rates(fa, w);
    res.r_plus[static_cast<std::size_t>(k - 1)] = r.plus(0, 1);
    res.r_minus[static_cast<std::size_t>(k - 1)] = r.minus(0, 1);
  }
  res.r_plus_sat = res.r_plus[static_cast<std::size_t>(k_sat - 1)];
  res.r_minus_sat = res.r_minus[static_cast<std::size_t>(k_sat - 1)];

  const double gap = res.r_plus_sat - res.r_minus_sat;
  if (std::abs(gap) < 1e-9 * (res.r_plus_sat + res.r_minus_sat)) {
    res.classification = BirthDeathKind::inconclusive;
    res.tail_bound = std::numeric_limits<double>::infinity();
    return res;
  }
  if (gap > 0.0) {
    res.classification = BirthDeathKind::transient;
    res.tail_bound = std::numeric_limits<double>::infinity();
    return res;
  }
  res.classification = BirthDeathKind::ergodic;

  // Unnormalised level weights in log space:
  //   log theta(k) = sum_{j=2..k} log r_plus(j-1) - log r_minus(j).
  std::vector<double> lt(static_cast<std::size_t>(res.k_max), 0.0);
  for (int k = 2; k <= res.k_max; ++k)
    lt[static_cast<std::size_t>(k - 1)] =
        lt[static_cast<std::size_t>(k - 2)] +
        std::log(res.r_plus[static_cast<std::size_t>(k - 2)]) -
        std::log(res.r_minus[static_cast<std::size_t>(k - 1)]);
  const double shift = *std::max_element(lt.begin(), lt.end());

  // Beyond the computed range every level ratio is within ~1e-6 relative of
  // R+/R-, so a slightly inflated geometric series bounds the missing mass.
  const double rho_hat = (res.r_plus_sat / res.r_minus_sat) * (1.0 + 1e-5);
  double tail_u = std::numeric_limits<double>::infinity();
  if (rho_hat < 1.0)
    tail_u = std::exp(lt.back() - shift) * rho_hat / (1.0 - rho_hat);

  double z = std::isfinite(tail_u) ? tail_u : 0.0;
  res.theta.resize(static_cast<std::size_t>(res.k_max));
  for (int k = 1; k <= res.k_max; ++k) {
    res.theta[static_cast<std::size_t>(k - 1)] =
        std::exp(lt[static_cast<std::size_t>(k - 1)] - shift);
    z += res.theta[static_cast<std::size_t>(k - 1)];
  }
  for (double& v : res.theta) v /= z;
  res.tail_bound = std::isfinite(tail_u) ? tail_u / z
                                         : std::numeric_limits<double>::infinity();
  return res;
}

// ---------------------------------------------------------------------------

DriftLimitReport limit_sup_drift(const NeuronParams& np, const PlasticityParams& pp,
                                 int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("limit_sup_drift: grid too small");
  np.validate();
  pp.validate();

  const SpinEnumeration sp(2);
  const double xi0 = gain(np, 0.0);
  const double alpha_sup = np.alpha_sup();

  const int s00 = sp.index(0u);
  const int s10 = sp.index(1u); // neuron 1 active
  const int s01 = sp.index(2u); // neuron 2 active

  // eta_{1->2} with the cross firing rates set directly: `fwd` is the rate of
  // neuron 2 turning on while 1 is active, `rev` the mirror image.
  auto eta12 = [&](double fwd, double rev) {
    RateTable rt;
    rt.n = 2;
    rt.beta = np.beta;
    rt.up.assign(sp.size() * 2u, 0.0);
    rt.up[static_cast<std::size_t>(s00) * 2 + 0] = xi0;
    rt.up[static_cast<std::size_t>(s00) * 2 + 1] = xi0;
    rt.up[static_cast<std::size_t>(s01) * 2 + 0] = rev;
    rt.up[static_cast<std::size_t>(s10) * 2 + 1] = fwd;
    const std::vector<double> mu = solve_mu(rt, sp);
    const AveragedRates r =
        assemble_rates(rt, sp, mu, pp, [&](int axis, double lambda) {
          return laplace_axis(rt, sp, mu, axis, lambda);
        });
    return (r.plus(0, 1) - r.minus(0, 1)) * pp.delta_w;
  };

  DriftLimitReport rep;
  rep.sup_eta = -std::numeric_limits<double>::infinity();
  rep.alpha_grid.resize(static_cast<std::size_t>(grid_points));
  rep.eta_pinned_forward.resize(static_cast<std::size_t>(grid_points));
  rep.eta_pinned_reverse.resize(static_cast<std::size_t>(grid_points));
  for (int g = 0; g < grid_points; ++g) {
    const double a = np.alpha_m + (alpha_sup - np.alpha_m) * g / (grid_points - 1);
    rep.alpha_grid[static_cast<std::size_t>(g)] = a;
    const double ef = eta12(alpha_sup, a);
    const double er = eta12(a, alpha_sup);
    rep.eta_pinned_forward[static_cast<std::size_t>(g)] = ef;
    rep.eta_pinned_reverse[static_cast<std::size_t>(g)] = er;
    if (ef > rep.sup_eta) { rep.sup_eta = ef; rep.alpha_at_sup = a; rep.branch_at_sup = 0; }
    if (er > rep.sup_eta) { rep.sup_eta = er; rep.alpha_at_sup = a; rep.branch_at_sup = 1; }
  }
  return rep;
}

} // namespace plastnet
