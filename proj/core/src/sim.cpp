#include "plastnet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plastnet/fast.hpp" // NumericalError

namespace plastnet {

void SimConfig::validate() const {
  const bool time_stop = std::isfinite(horizon_ms);
  const bool event_stop = max_events != UINT64_MAX;
  if (!time_stop && !event_stop)
    throw std::invalid_argument("SimConfig: need a time horizon or an event budget");
  if (time_stop && !(horizon_ms > 0.0))
    throw std::invalid_argument("SimConfig: horizon must be positive");
  if (event_stop && max_events == 0)
    throw std::invalid_argument("SimConfig: event budget must be positive");
  if (!(burn_in_ms >= 0.0))
    throw std::invalid_argument("SimConfig: burn-in must be >= 0");
  if (time_stop && burn_in_ms >= horizon_ms)
    throw std::invalid_argument("SimConfig: burn-in must end before the horizon");
  if (!(sample_interval_ms >= 0.0))
    throw std::invalid_argument("SimConfig: sample interval must be >= 0");
  if (batch_count < 2)
    throw std::invalid_argument("SimConfig: need at least two batches");
  if (audit_interval == 0)
    throw std::invalid_argument("SimConfig: audit interval must be >= 1");
  if (max_records == 0)
    throw std::invalid_argument("SimConfig: record capacity must be >= 1");
  for (std::size_t g = 0; g < u_grid.size(); ++g) {
    if (!(u_grid[g] >= 0.0))
      throw std::invalid_argument("SimConfig: u-grid values must be >= 0");
    if (g > 0 && !(u_grid[g] > u_grid[g - 1]))
      throw std::invalid_argument("SimConfig: u-grid must be strictly increasing");
  }
}

// Time-weighted statistics, accumulated as integrals plus per-batch marks.
// Flat layout: [occupancy 2^n][uncond tails n*nu][joint tails n*n*nu]
// [r+ n*n][r- n*n].
struct Simulator::Accumulators {
  int n = 0, nu = 0;
  std::size_t tu_base = 0, tj_base = 0, rp_base = 0, rm_base = 0, n_stats = 0;
  std::vector<double> running, mark;
  std::vector<double> batch_vals; // closed batches, n_stats each
  std::vector<double> batch_times;
  double t_int = 0.0, t_mark = 0.0;
  std::uint64_t events_in_batch = 0;
  std::uint64_t batch_len_events = 0; // 0 = batch by time instead
  double batch_len_time = 0.0, next_batch_t = 0.0;
  std::uint32_t mask = 0;
  std::vector<double> scratch;

  Accumulators(int n_, const SimConfig& cfg) : n(n_), nu(static_cast<int>(cfg.u_grid.size())) {
    const std::size_t occ = std::size_t{1} << n;
    tu_base = occ;
    tj_base = tu_base + static_cast<std::size_t>(n) * nu;
    rp_base = tj_base + static_cast<std::size_t>(n) * n * nu;
    rm_base = rp_base + static_cast<std::size_t>(n) * n;
    n_stats = rm_base + static_cast<std::size_t>(n) * n;
    running.assign(n_stats, 0.0);
    mark.assign(n_stats, 0.0);
    scratch.assign(static_cast<std::size_t>(std::max(nu, 1)), 0.0);
    if (cfg.max_events != UINT64_MAX)
      batch_len_events = std::max<std::uint64_t>(1, cfg.max_events / cfg.batch_count);
    else {
      batch_len_time = (cfg.horizon_ms - cfg.burn_in_ms) / cfg.batch_count;
      next_batch_t = cfg.burn_in_ms + batch_len_time;
    }
  }
};

Simulator::Simulator(const NeuronParams& np, const PlasticityParams& pp,
                     WeightMatrix w0, const SimConfig& cfg)
    : Simulator(np, pp, w0, cfg, NetworkState(w0.n())) {}

Simulator::~Simulator() = default;

Simulator::Simulator(const NeuronParams& np, const PlasticityParams& pp,
                     WeightMatrix w0, const SimConfig& cfg,
                     const NetworkState& initial)
    : np_(np), pp_(pp), cfg_(cfg), w_(std::move(w0)), n_(w_.n()),
      tree_(w_.n()), rng_(cfg.seed) {
  np_.validate();
  pp_.validate();
  cfg_.validate();
  w_.validate();
  if (initial.v.size() != static_cast<std::size_t>(n_) ||
      initial.last_spike.size() != static_cast<std::size_t>(n_))
    throw std::invalid_argument("Simulator: initial state size mismatch");
  if (cfg_.collect_estimates) {
    if (n_ > 10)
      throw std::invalid_argument("Simulator: estimators support at most 10 neurons");
    if (cfg_.mode == SimMode::plastic)
      throw std::invalid_argument(
          "Simulator: stationary estimators need frozen weights");
  }

  t_ = initial.t;
  v_ = initial.v;
  last_spike_ = initial.last_spike;
  for (int i = 0; i < n_; ++i)
    if (v_[static_cast<std::size_t>(i)] > 1)
      throw std::invalid_argument("Simulator: activity entries must be 0/1");

  frozen_.assign(static_cast<std::size_t>(n_) * n_, 0);
  for (auto [fi, fj] : cfg_.frozen_pairs) {
    if (fi < 0 || fj < 0 || fi >= n_ || fj >= n_ || fi == fj)
      throw std::invalid_argument("Simulator: bad frozen pair");
    frozen_[static_cast<std::size_t>(fi) * n_ + fj] = 1;
  }

  m_.assign(static_cast<std::size_t>(n_), 0);
  for (int j = 0; j < n_; ++j) {
    std::int64_t mj = 0;
    for (int k = 0; k < n_; ++k)
      if (v_[static_cast<std::size_t>(k)]) mj += w_.k(k, j);
    m_[static_cast<std::size_t>(j)] = mj;
  }
  rates_.assign(static_cast<std::size_t>(n_), 0.0);
  refresh_rates();

  if (cfg_.collect_estimates) {
    acc_ = std::make_unique<Accumulators>(n_, cfg_);
    for (int i = 0; i < n_; ++i)
      if (v_[static_cast<std::size_t>(i)]) acc_->mask |= 1u << i;
  }
}

double Simulator::rate_of(int i) const {
  return v_[static_cast<std::size_t>(i)]
             ? np_.beta
             : gain_table_[static_cast<std::size_t>(m_[static_cast<std::size_t>(i)])];
}

void Simulator::refresh_rates() {
  std::int64_t m_max = 0;
  for (int j = 0; j < n_; ++j)
    m_max = std::max(m_max, m_[static_cast<std::size_t>(j)]);
  if (static_cast<std::size_t>(m_max) >= gain_table_.size()) {
    std::size_t cap = std::max<std::size_t>(16, gain_table_.size());
    while (cap <= static_cast<std::size_t>(m_max)) cap *= 2;
    const std::size_t old = gain_table_.size();
    gain_table_.resize(cap);
    for (std::size_t m = old; m < cap; ++m)
      gain_table_[m] = gain(np_, pp_.delta_w * static_cast<double>(m));
  }
  const std::uint8_t* v = v_.data();
  const std::int64_t* m = m_.data();
  double* r = rates_.data();
  const double beta = np_.beta;
  const double* gt = gain_table_.data();
  for (int j = 0; j < n_; ++j)
    r[j] = v[j] ? beta : gt[m[j]];
  tree_.rebuild(r);
}

void Simulator::audit() const {
  for (int j = 0; j < n_; ++j) {
    std::int64_t mj = 0;
    for (int k = 0; k < n_; ++k)
      if (v_[static_cast<std::size_t>(k)]) mj += w_.k(k, j);
    if (mj != m_[static_cast<std::size_t>(j)])
      throw NumericalError("audit: incremental input sums drifted");
    const double expect =
        v_[static_cast<std::size_t>(j)] ? np_.beta
                                        : gain(np_, pp_.delta_w * static_cast<double>(mj));
    const double have = rates_[static_cast<std::size_t>(j)];
    if (std::abs(have - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw NumericalError("audit: cached rate drifted");
  }
  double total = 0.0;
  for (int j = 0; j < n_; ++j) total += rates_[static_cast<std::size_t>(j)];
  if (std::abs(total - tree_.total()) > 1e-9 * std::max(1.0, total))
    throw NumericalError("audit: selection tree total drifted");
}

void Simulator::integrate_segment(double a, double b) {
  Accumulators& ac = *acc_;
  if (b <= cfg_.burn_in_ms) return;
  a = std::max(a, cfg_.burn_in_ms);
  const double seg = b - a;
  if (!(seg > 0.0)) return;
  ac.t_int += seg;
  ac.running[ac.mask] += seg;

  const int nu = ac.nu;
  for (int i = 0; i < n_; ++i) {
    const double ls = last_spike_[static_cast<std::size_t>(i)];
    // Overlap of (a, b] with {s_i > u}: the age crosses u at ls + u.
    int live = 0;
    for (int g = 0; g < nu; ++g) {
      const double thresh = (ls == NetworkState::kNeverSpiked)
                                ? a
                                : ls + cfg_.u_grid[static_cast<std::size_t>(g)];
      const double ov = b - std::max(a, thresh);
      if (ov <= 0.0) break;
      ac.scratch[static_cast<std::size_t>(g)] = ov;
      live = g + 1;
    }
    if (live == 0) continue;
    double* tu = ac.running.data() + ac.tu_base + static_cast<std::size_t>(i) * nu;
    for (int g = 0; g < live; ++g) tu[g] += ac.scratch[static_cast<std::size_t>(g)];
    for (int j = 0; j < n_; ++j) {
      if (j == i || v_[static_cast<std::size_t>(j)]) continue;
      double* tj = ac.running.data() + ac.tj_base +
                   (static_cast<std::size_t>(i) * n_ + j) * nu;
      for (int g = 0; g < live; ++g) tj[g] += ac.scratch[static_cast<std::size_t>(g)];
    }
  }
}

void Simulator::close_batch() {
  Accumulators& ac = *acc_;
  const double dt = ac.t_int - ac.t_mark;
  if (dt > 0.0) {
    ac.batch_times.push_back(dt);
    ac.batch_vals.resize(ac.batch_vals.size() + ac.n_stats);
    double* dst = ac.batch_vals.data() + ac.batch_vals.size() - ac.n_stats;
    for (std::size_t s = 0; s < ac.n_stats; ++s)
      dst[s] = ac.running[s] - ac.mark[s];
    ac.mark = ac.running;
    ac.t_mark = ac.t_int;
  }
  ac.events_in_batch = 0;
  if (ac.batch_len_events == 0) ac.next_batch_t += ac.batch_len_time;
}

void Simulator::finish_estimates(StationaryEstimates& est) const {
  const Accumulators& ac = *acc_;
  est.n = n_;
  est.u_grid = cfg_.u_grid;
  est.time_total = ac.t_int;

  const std::size_t nb = ac.batch_times.size();
  est.insufficient_samples = nb < 8 || !(ac.t_int > 0.0);

  double t_sum = 0.0;
  for (double bt : ac.batch_times) t_sum += bt;

  auto make = [&](std::size_t s) {
    EstimateWithSE e;
    e.batches = static_cast<int>(nb);
    e.value = ac.t_int > 0.0 ? ac.running[s] / ac.t_int : 0.0;
    if (nb >= 2 && t_sum > 0.0) {
      // Weighted batch means: SE^2 = sum w_b^2 (m_b - mean)^2 * B/(B-1).
      const double mean = ac.running[s] / ac.t_int;
      double acc = 0.0;
      for (std::size_t b = 0; b < nb; ++b) {
        const double w = ac.batch_times[b] / t_sum;
        const double mb = ac.batch_vals[b * ac.n_stats + s] / ac.batch_times[b];
        acc += w * w * (mb - mean) * (mb - mean);
      }
      e.se = std::sqrt(acc * static_cast<double>(nb) / static_cast<double>(nb - 1));
    } else {
      e.se = std::numeric_limits<double>::quiet_NaN();
    }
    return e;
  };

  const std::size_t occ = std::size_t{1} << n_;
  est.occupancy.resize(occ);
  for (std::size_t s = 0; s < occ; ++s) est.occupancy[s] = make(s);
  est.tail_uncond.resize(static_cast<std::size_t>(n_) * ac.nu);
  for (std::size_t s = 0; s < est.tail_uncond.size(); ++s)
    est.tail_uncond[s] = make(ac.tu_base + s);
  est.tail_joint.resize(static_cast<std::size_t>(n_) * n_ * ac.nu);
  for (std::size_t s = 0; s < est.tail_joint.size(); ++s)
    est.tail_joint[s] = make(ac.tj_base + s);
  est.r_plus_hat.resize(static_cast<std::size_t>(n_) * n_);
  est.r_minus_hat.resize(static_cast<std::size_t>(n_) * n_);
  for (std::size_t s = 0; s < est.r_plus_hat.size(); ++s) {
    est.r_plus_hat[s] = make(ac.rp_base + s);
    est.r_minus_hat[s] = make(ac.rm_base + s);
  }
}

EventRecord Simulator::apply_event(int i, double tn,
                                   std::vector<EventRecord>* plastic_records) {
  EventRecord rec;
  rec.t = tn;
  rec.i = i;

  if (v_[static_cast<std::size_t>(i)]) {
    // Active -> inactive: only the activity flips.
    rec.kind = EventKind::down;
    v_[static_cast<std::size_t>(i)] = 0;
    const std::int32_t* row = w_.row(i);
    for (int j = 0; j < n_; ++j) m_[static_cast<std::size_t>(j)] -= row[j];
    ++n_down_;
    if (acc_) acc_->mask &= ~(1u << i);
  } else {
    // Inactive -> active: a spike of i. Shadow statistics and plasticity
    // draws use the pre-spike ages of the other neurons.
    rec.kind = EventKind::up;

    if (acc_ && tn >= cfg_.burn_in_ms) {
      Accumulators& ac = *acc_;
      for (int j = 0; j < n_; ++j) {
        if (j == i) continue;
        const double s = tn - last_spike_[static_cast<std::size_t>(j)];
        ac.running[ac.rp_base + static_cast<std::size_t>(j) * n_ + i] +=
            p_plus(pp_, s);
        ac.running[ac.rm_base + static_cast<std::size_t>(i) * n_ + j] +=
            p_minus(pp_, s);
      }
    }

    if (cfg_.mode != SimMode::frozen_silent && n_ > 1) {
      const bool apply_w = cfg_.mode == SimMode::plastic;
      // Exact thinning: candidates arrive as Bernoulli(eps * A) successes,
      // found by geometric skips; each is accepted with the age-dependent
      // remainder exp(-s/tau).
      auto skip = [this](double p) -> std::int64_t {
        const std::uint64_t s = rng_.geometric_skip(p);
        return s > static_cast<std::uint64_t>(n_) ? static_cast<std::int64_t>(n_)
                                                  : static_cast<std::int64_t>(s);
      };
      const double p_cand_plus = pp_.epsilon * pp_.a_plus;
      for (std::int64_t pos = skip(p_cand_plus); pos < n_ - 1;
           pos += 1 + skip(p_cand_plus)) {
        const int j = static_cast<int>(pos < i ? pos : pos + 1);
        if (frozen_[static_cast<std::size_t>(j) * n_ + i]) continue;
        const double s = tn - last_spike_[static_cast<std::size_t>(j)];
        if (rng_.uniform01() < std::exp(-s / pp_.tau_plus)) {
          ++n_pot_;
          if (apply_w) {
            w_.bump(j, i, +1);
            if (v_[static_cast<std::size_t>(j)]) m_[static_cast<std::size_t>(i)] += 1;
          }
          if (plastic_records)
            plastic_records->push_back(
                EventRecord{tn, EventKind::potentiate, j, i});
        }
      }
      const double p_cand_minus = pp_.epsilon * pp_.a_minus;
      for (std::int64_t pos = skip(p_cand_minus); pos < n_ - 1;
           pos += 1 + skip(p_cand_minus)) {
        const int j = static_cast<int>(pos < i ? pos : pos + 1);
        if (frozen_[static_cast<std::size_t>(i) * n_ + j]) continue;
        const double s = tn - last_spike_[static_cast<std::size_t>(j)];
        if (rng_.uniform01() < std::exp(-s / pp_.tau_minus)) {
          if (w_.k(i, j) > 1) { // at the floor the depression is suppressed
            ++n_dep_;
            if (apply_w) {
              w_.bump(i, j, -1);
              // v_i is still 0 here; the flip below re-adds row i with the
              // updated quanta, so no patch to m_ is needed.
            }
            if (plastic_records)
              plastic_records->push_back(
                  EventRecord{tn, EventKind::depress, i, j});
          }
        }
      }
    }

    v_[static_cast<std::size_t>(i)] = 1;
    last_spike_[static_cast<std::size_t>(i)] = tn;
    const std::int32_t* row = w_.row(i);
    for (int j = 0; j < n_; ++j) m_[static_cast<std::size_t>(j)] += row[j];
    ++n_up_;
    if (acc_) acc_->mask |= 1u << i;
  }

  refresh_rates();

  if ((n_up_ + n_down_) % cfg_.audit_interval == 0) {
    audit();
    ++audits_;
  }
  return rec;
}

EventRecord Simulator::step() {
  const double total = tree_.total();
  const double dt = rng_.exponential(total);
  const double tn = t_ + dt;
  t_ = tn;
  const int i = tree_.sample(rng_.uniform01() * total);
  return apply_event(i, tn, nullptr);
}

NetworkState Simulator::state() const {
  NetworkState st(n_);
  st.t = t_;
  st.v = v_;
  st.last_spike = last_spike_;
  return st;
}

RunResult Simulator::run() {
  RunResult res;
  std::vector<EventRecord> plastic_buf;

  double next_snap = 0.0;
  const bool snapshots = cfg_.sample_interval_ms > 0.0;

  std::uint64_t record_counter = 0;
  auto push_record = [&](const EventRecord& r) {
    if (!cfg_.record_events) return;
    if (record_counter++ % res.record_stride != 0) return;
    if (res.trajectory.size() >= cfg_.max_records) {
      // Thin in place: keep every second record, double the stride.
      std::size_t out = 0;
      for (std::size_t s = 0; s < res.trajectory.size(); s += 2)
        res.trajectory[out++] = res.trajectory[s];
      res.trajectory.resize(out);
      res.record_stride *= 2;
    }
    res.trajectory.push_back(r);
  };
  auto take_snapshots_until = [&](double limit) {
    if (!snapshots) return;
    while (next_snap <= limit) {
      res.snapshots.push_back(WeightSnapshot{next_snap, w_.quanta()});
      next_snap += cfg_.sample_interval_ms;
    }
  };

  while (n_up_ + n_down_ < cfg_.max_events) {
    const double total = tree_.total();
    const double dt = rng_.exponential(total);
    const double tn = t_ + dt;

    if (tn >= cfg_.horizon_ms) {
      if (acc_) integrate_segment(t_, cfg_.horizon_ms);
      take_snapshots_until(cfg_.horizon_ms);
      t_ = cfg_.horizon_ms;
      break;
    }

    if (acc_) integrate_segment(t_, tn);
    // Snapshots strictly before the event see the pre-event weights.
    take_snapshots_until(std::nextafter(tn, 0.0));

    t_ = tn;
    const int i = tree_.sample(rng_.uniform01() * total);

    // Re-run the event body via step_inner's logic, but we already consumed
    // the waiting-time and selection draws; inline the application instead.
    EventRecord rec = apply_event(i, tn, cfg_.record_events ? &plastic_buf : nullptr);
    push_record(rec);
    for (const EventRecord& pr : plastic_buf) push_record(pr);
    plastic_buf.clear();

    if (acc_ && tn >= cfg_.burn_in_ms) {
      Accumulators& ac = *acc_;
      if (ac.batch_len_events > 0) {
        if (++ac.events_in_batch >= ac.batch_len_events) close_batch();
      } else if (ac.t_int >= ac.next_batch_t - cfg_.burn_in_ms) {
        close_batch();
      }
    }
  }

  if (acc_) {
    // Fold a sufficiently full trailing batch, then finalise.
    Accumulators& ac = *acc_;
    const double leftover = ac.t_int - ac.t_mark;
    double mean_bt = 0.0;
    for (double bt : ac.batch_times) mean_bt += bt;
    mean_bt = ac.batch_times.empty() ? 0.0 : mean_bt / ac.batch_times.size();
    if (leftover > 0.5 * mean_bt) close_batch();
    finish_estimates(res.estimates);
  }

  res.t_end = t_;
  res.events = n_up_ + n_down_;
  res.n_up = n_up_;
  res.n_down = n_down_;
  res.n_pot = n_pot_;
  res.n_dep = n_dep_;
  res.final_w = w_;
  res.final_state = state();
  res.audits = audits_;
  return res;
}

StationaryEstimates estimate_stationary(const NeuronParams& np,
                                        const PlasticityParams& pp,
                                        const WeightMatrix& w, SimConfig cfg) {
  if (cfg.mode == SimMode::plastic) cfg.mode = SimMode::frozen_shadow;
  cfg.collect_estimates = true;
  Simulator sim(np, pp, w, cfg);
  return sim.run().estimates;
}

std::vector<StdpPoint> stdp_curve(const PlasticityParams& pp,
                                  const std::vector<double>& dt_grid,
                                  int pairings, double w0) {
  pp.validate();
  if (pairings < 1) throw std::invalid_argument("stdp_curve: pairings must be >= 1");
  if (!(w0 > 0.0)) throw std::invalid_argument("stdp_curve: w0 must be positive");
  std::vector<StdpPoint> out;
  out.reserve(dt_grid.size());
  for (double dt : dt_grid) {
    if (dt == 0.0)
      throw std::invalid_argument("stdp_curve: dt = 0 has no defined ordering");
    if (!std::isfinite(dt)) throw std::invalid_argument("stdp_curve: dt not finite");
    const double per_pair = dt > 0.0
                                ? pp.delta_w * pp.epsilon * p_plus(pp, dt)
                                : -pp.delta_w * pp.epsilon * p_minus(pp, -dt);
    out.push_back(StdpPoint{dt, static_cast<double>(pairings) * per_pair / w0});
  }
  return out;
}

} // namespace plastnet
