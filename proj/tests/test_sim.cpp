// Event-driven simulator: determinism, bookkeeping invariants, statistical
// agreement with the closed-form single-neuron law and the dense stationary
// solver, and the analytic pairing-protocol curve.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "plastnet/fast.hpp"
#include "plastnet/sim.hpp"
#include "plastnet/spin.hpp"
#include "plastnet/sum_tree.hpp"
#include "plastnet/weights.hpp"

using namespace plastnet;

namespace {

// Gain pinned (numerically) to a single value `alpha` regardless of input.
NeuronParams flat_gain(double alpha, double beta) {
  NeuronParams np;
  np.beta = beta;
  np.alpha_m = alpha;
  np.s0 = 1e-12;
  np.theta = 0.0;
  np.sigma = 0.3;
  return np;
}

bool same_records(const std::vector<EventRecord>& a,
                  const std::vector<EventRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k].t != b[k].t || a[k].kind != b[k].kind || a[k].i != b[k].i ||
        a[k].j != b[k].j)
      return false;
  return true;
}

} // namespace

TEST_CASE("config validation rejects inconsistent run settings") {
  SimConfig ok;
  ok.horizon_ms = 100.0;
  CHECK_NOTHROW(ok.validate());

  SimConfig c = ok;
  c.horizon_ms = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument); // no stopping rule
  c.max_events = 10;
  CHECK_NOTHROW(c.validate());

  c = ok;
  c.horizon_ms = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.horizon_ms = std::numeric_limits<double>::infinity();
  c.max_events = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.burn_in_ms = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.burn_in_ms = 100.0; // must end before the horizon
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.sample_interval_ms = -0.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.batch_count = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.audit_interval = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.max_records = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.u_grid = {-1.0, 2.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ok;
  c.u_grid = {0.0, 2.0, 2.0}; // not strictly increasing
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("constructor guards: estimators, state sizes, frozen pairs") {
  NeuronParams np;
  PlasticityParams pp;
  SimConfig cfg;
  cfg.max_events = 10;

  SimConfig est = cfg;
  est.collect_estimates = true;
  est.mode = SimMode::plastic;
  CHECK_THROWS_AS(Simulator(np, pp, WeightMatrix::uniform(2), est),
                  std::invalid_argument); // estimators need frozen weights
  est.mode = SimMode::frozen_shadow;
  CHECK_THROWS_AS(Simulator(np, pp, WeightMatrix::uniform(11), est),
                  std::invalid_argument); // 2^n occupancy table capped at n=10
  CHECK_NOTHROW(Simulator(np, pp, WeightMatrix::uniform(10), est));

  NetworkState wrong(3);
  CHECK_THROWS_AS(Simulator(np, pp, WeightMatrix::uniform(2), cfg, wrong),
                  std::invalid_argument);
  NetworkState bad(2);
  bad.v[0] = 2;
  CHECK_THROWS_AS(Simulator(np, pp, WeightMatrix::uniform(2), cfg, bad),
                  std::invalid_argument);

  SimConfig fz = cfg;
  fz.frozen_pairs = {{0, 0}};
  CHECK_THROWS_AS(Simulator(np, pp, WeightMatrix::uniform(2), fz),
                  std::invalid_argument); // diagonal is not a weight
  fz.frozen_pairs = {{0, 2}};
  CHECK_THROWS_AS(Simulator(np, pp, WeightMatrix::uniform(2), fz),
                  std::invalid_argument);
  fz.frozen_pairs = {{-1, 1}};
  CHECK_THROWS_AS(Simulator(np, pp, WeightMatrix::uniform(2), fz),
                  std::invalid_argument);
  fz.frozen_pairs = {{1, 0}};
  CHECK_NOTHROW(Simulator(np, pp, WeightMatrix::uniform(2), fz));
}

TEST_CASE("runs are deterministic in the seed and diverge across seeds") {
  NeuronParams np;
  PlasticityParams pp;
  pp.epsilon = 0.5;
  WeightMatrix w0 = WeightMatrix::from_quanta(3, {0, 4, 2, 6, 0, 3, 1, 5, 0});

  SimConfig cfg;
  cfg.seed = 2024;
  cfg.max_events = 4000;
  cfg.mode = SimMode::plastic;
  cfg.record_events = true;

  Simulator a(np, pp, w0, cfg);
  Simulator b(np, pp, w0, cfg);
  RunResult ra = a.run();
  RunResult rb = b.run();
  CHECK(ra.t_end == rb.t_end);
  CHECK(ra.events == rb.events);
  CHECK(ra.n_pot == rb.n_pot);
  CHECK(ra.n_dep == rb.n_dep);
  CHECK(ra.final_w == rb.final_w);
  CHECK(same_records(ra.trajectory, rb.trajectory));

  cfg.seed = 2025;
  Simulator c(np, pp, w0, cfg);
  RunResult rc = c.run();
  REQUIRE(!ra.trajectory.empty());
  REQUIRE(!rc.trajectory.empty());
  CHECK(ra.trajectory[0].t != rc.trajectory[0].t);
}

TEST_CASE("trajectory records reconcile with the event counters") {
  NeuronParams np;
  PlasticityParams pp;
  pp.epsilon = 1.0;
  pp.a_plus = 0.9;
  pp.a_minus = 0.8;
  WeightMatrix w0 = WeightMatrix::uniform(3, 8);

  SimConfig cfg;
  cfg.seed = 7;
  cfg.max_events = 6000;
  cfg.mode = SimMode::plastic;
  cfg.record_events = true;
  cfg.max_records = 1u << 24; // large enough that no thinning happens

  RunResult r = Simulator(np, pp, w0, cfg).run();
  REQUIRE(r.record_stride == 1);
  CHECK(r.events == cfg.max_events);
  CHECK(r.events == r.n_up + r.n_down);

  std::uint64_t up = 0, down = 0, pot = 0, dep = 0;
  double prev_t = -1.0;
  for (const EventRecord& e : r.trajectory) {
    CHECK(e.t >= prev_t); // plasticity shares its flip's timestamp
    prev_t = e.t;
    switch (e.kind) {
      case EventKind::up: ++up; CHECK(e.j == -1); break;
      case EventKind::down: ++down; CHECK(e.j == -1); break;
      case EventKind::potentiate: ++pot; break;
      case EventKind::depress: ++dep; break;
    }
  }
  CHECK(up == r.n_up);
  CHECK(down == r.n_down);
  CHECK(pot == r.n_pot);
  CHECK(dep == r.n_dep);
  CHECK(r.n_pot > 0);
  CHECK(r.n_dep > 0);
}

TEST_CASE("replaying the plasticity log reproduces the final weights") {
  NeuronParams np;
  PlasticityParams pp;
  pp.epsilon = 1.0;
  pp.a_plus = 1.0;
  pp.a_minus = 1.0;
  WeightMatrix w0 = WeightMatrix::from_quanta(3, {0, 2, 1, 1, 0, 3, 2, 1, 0});

  SimConfig cfg;
  cfg.seed = 31;
  cfg.max_events = 20000;
  cfg.mode = SimMode::plastic;
  cfg.record_events = true;
  cfg.max_records = 1u << 24;

  RunResult r = Simulator(np, pp, w0, cfg).run();
  REQUIRE(r.record_stride == 1);

  WeightMatrix replica = w0;
  for (const EventRecord& e : r.trajectory) {
    if (e.kind == EventKind::potentiate) replica.bump(e.i, e.j, +1);
    else if (e.kind == EventKind::depress) replica.bump(e.i, e.j, -1);
    // bump() itself enforces the one-quantum floor; reaching it here would
    // throw and fail the test.
  }
  CHECK(replica == r.final_w);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(r.final_w.k(i, j) >= 1);
  CHECK(r.n_dep > 0); // depressions actually occurred in this run
}

TEST_CASE("frozen modes never mutate the weight matrix") {
  NeuronParams np;
  PlasticityParams pp;
  pp.epsilon = 1.0;
  pp.a_plus = 0.9;
  pp.a_minus = 0.9;
  WeightMatrix w0 = WeightMatrix::uniform(3, 5);

  SimConfig cfg;
  cfg.seed = 11;
  cfg.max_events = 5000;

  cfg.mode = SimMode::frozen_silent;
  RunResult silent = Simulator(np, pp, w0, cfg).run();
  CHECK(silent.final_w == w0);
  CHECK(silent.n_pot == 0);
  CHECK(silent.n_dep == 0);

  cfg.mode = SimMode::frozen_shadow;
  RunResult shadow = Simulator(np, pp, w0, cfg).run();
  CHECK(shadow.final_w == w0);
  CHECK(shadow.n_pot > 0); // drawn and counted, never applied

  cfg.mode = SimMode::plastic;
  RunResult plastic = Simulator(np, pp, w0, cfg).run();
  CHECK(plastic.final_w != w0);
}

TEST_CASE("frozen pairs are clamped while the rest stays plastic") {
  NeuronParams np;
  PlasticityParams pp;
  pp.epsilon = 1.0;
  pp.a_plus = 1.0;
  pp.a_minus = 0.2;
  WeightMatrix w0 = WeightMatrix::uniform(2, 10);

  SimConfig cfg;
  cfg.seed = 5;
  cfg.max_events = 30000;
  cfg.mode = SimMode::plastic;
  cfg.record_events = true;
  cfg.max_records = 1u << 24;
  cfg.frozen_pairs = {{0, 1}};

  RunResult r = Simulator(np, pp, w0, cfg).run();
  CHECK(r.final_w.k(0, 1) == w0.k(0, 1));
  CHECK(r.final_w.k(1, 0) != w0.k(1, 0));
  for (const EventRecord& e : r.trajectory)
    if (e.kind == EventKind::potentiate || e.kind == EventKind::depress)
      CHECK((e.i != 0 || e.j != 1));
}

TEST_CASE("spike ages reset on up-flips and coast through down-flips") {
  NeuronParams np;
  PlasticityParams pp;
  SimConfig cfg;
  cfg.seed = 3;
  cfg.max_events = 1000;
  cfg.mode = SimMode::frozen_silent;

  Simulator sim(np, pp, WeightMatrix::uniform(2, 4), cfg);
  CHECK(sim.state().last_spike[0] == NetworkState::kNeverSpiked);

  bool saw_down = false;
  for (int k = 0; k < 400; ++k) {
    EventRecord e = sim.step();
    NetworkState st = sim.state();
    CHECK(st.t == sim.t());
    if (e.kind == EventKind::up) {
      CHECK(st.last_spike[static_cast<std::size_t>(e.i)] == e.t);
      CHECK(st.age(e.i) == 0.0);
    } else {
      saw_down = true;
      CHECK(st.last_spike[static_cast<std::size_t>(e.i)] < e.t);
    }
  }
  CHECK(saw_down);
  CHECK(sim.events() == 400);
}

TEST_CASE("internal audits run on schedule and stay clean") {
  NeuronParams np;
  PlasticityParams pp;
  pp.epsilon = 1.0;
  pp.a_plus = 0.9;
  pp.a_minus = 0.9;

  SimConfig cfg;
  cfg.seed = 17;
  cfg.max_events = 100000;
  cfg.mode = SimMode::plastic;
  cfg.audit_interval = 1000;

  RunResult r = Simulator(np, pp, WeightMatrix::uniform(4, 3), cfg).run();
  CHECK(r.audits == r.events / cfg.audit_interval);
  CHECK(r.audits == 100);
}

TEST_CASE("weight snapshots are periodic and end at the final weights") {
  NeuronParams np;
  PlasticityParams pp;
  pp.epsilon = 1.0;
  pp.a_plus = 0.9;
  pp.a_minus = 0.9;

  SimConfig cfg;
  cfg.seed = 23;
  cfg.horizon_ms = 100.0;
  cfg.mode = SimMode::plastic;
  cfg.sample_interval_ms = 10.0;

  RunResult r = Simulator(np, pp, WeightMatrix::uniform(2, 6), cfg).run();
  REQUIRE(r.snapshots.size() == 11); // t = 0, 10, ..., 100
  for (std::size_t s = 0; s < r.snapshots.size(); ++s) {
    CHECK(r.snapshots[s].t == 10.0 * static_cast<double>(s));
    CHECK(r.snapshots[s].quanta.size() == 4);
  }
  CHECK(r.snapshots.front().quanta == WeightMatrix::uniform(2, 6).quanta());
  CHECK(r.snapshots.back().quanta == r.final_w.quanta());
  CHECK(r.t_end == 100.0);
}

TEST_CASE("record thinning doubles the stride instead of growing unbounded") {
  NeuronParams np;
  PlasticityParams pp;
  SimConfig cfg;
  cfg.seed = 13;
  cfg.max_events = 4000;
  cfg.mode = SimMode::frozen_silent;
  cfg.record_events = true;
  cfg.max_records = 64;

  RunResult r = Simulator(np, pp, WeightMatrix::uniform(2, 3), cfg).run();
  CHECK(r.trajectory.size() <= cfg.max_records);
  CHECK(r.record_stride > 1);
  CHECK((r.record_stride & (r.record_stride - 1)) == 0); // power of two
  double prev = -1.0;
  for (const EventRecord& e : r.trajectory) {
    CHECK(e.t > prev);
    prev = e.t;
  }
}

TEST_CASE("single-neuron occupancy and age tails match the closed form") {
  const double alpha = 0.5, beta = 0.4;
  NeuronParams np = flat_gain(alpha, beta);
  PlasticityParams pp;
  SingleNeuronLaw law(alpha, beta);

  SimConfig cfg;
  cfg.seed = 404;
  cfg.max_events = 300000;
  cfg.mode = SimMode::frozen_silent;
  cfg.burn_in_ms = 50.0;
  cfg.u_grid = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};

  StationaryEstimates est =
      estimate_stationary(np, pp, WeightMatrix::uniform(1), cfg);
  REQUIRE(!est.insufficient_samples);
  REQUIRE(est.n == 1);

  const EstimateWithSE& occ1 = est.occupancy[1];
  CHECK(std::abs(occ1.value - law.occupancy_on()) < 4.0 * occ1.se);
  CHECK(occ1.se < 0.01);

  for (std::size_t g = 0; g < cfg.u_grid.size(); ++g) {
    const EstimateWithSE& tg = est.tail_uncond[g];
    const double want = law.tail(cfg.u_grid[g]);
    CHECK(std::abs(tg.value - want) < 4.0 * tg.se + 1e-12);
  }
  // The u = 0 tail is a probability-one event.
  CHECK(est.tail_uncond[0].value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-neuron occupancy matches the dense stationary solver") {
  NeuronParams np;
  PlasticityParams pp;
  WeightMatrix w = WeightMatrix::from_quanta(2, {0, 9, 23, 0});

  SpinEnumeration sp(2);
  RateTable rt = make_rate_table(np, w, pp.delta_w, sp);
  std::vector<double> mu = solve_mu(rt, sp);

  SimConfig cfg;
  cfg.seed = 808;
  cfg.max_events = 400000;
  cfg.burn_in_ms = 100.0;

  StationaryEstimates est = estimate_stationary(np, pp, w, cfg);
  REQUIRE(!est.insufficient_samples);
  for (std::uint32_t mask = 0; mask < 4; ++mask) {
    const EstimateWithSE& o = est.occupancy[mask];
    const double want = mu[static_cast<std::size_t>(sp.index(mask))];
    CHECK(std::abs(o.value - want) < 4.0 * o.se + 1e-12);
    CHECK(o.se > 0.0);
    CHECK(o.batches >= 8);
  }
  double total = 0.0;
  for (const EstimateWithSE& o : est.occupancy) total += o.value;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shadow pairing rates are collected for clamped pairs too") {
  // Clamping stops weight updates, not the age statistics: the estimated
  // pairing rates must stay populated for every ordered pair.
  NeuronParams np;
  PlasticityParams pp;
  SimConfig cfg;
  cfg.seed = 99;
  cfg.max_events = 50000;
  cfg.frozen_pairs = {{0, 1}, {1, 0}};

  StationaryEstimates est =
      estimate_stationary(np, pp, WeightMatrix::uniform(2, 12), cfg);
  CHECK(est.r_plus_hat[0 * 2 + 1].value > 0.0);
  CHECK(est.r_plus_hat[1 * 2 + 0].value > 0.0);
  CHECK(est.r_minus_hat[0 * 2 + 1].value > 0.0);
  CHECK(est.r_minus_hat[1 * 2 + 0].value > 0.0);
}

TEST_CASE("horizon stop integrates estimators up to the horizon exactly") {
  NeuronParams np = flat_gain(0.3, 0.2);
  PlasticityParams pp;
  SimConfig cfg;
  cfg.seed = 6;
  cfg.horizon_ms = 5000.0;
  cfg.burn_in_ms = 500.0;
  cfg.mode = SimMode::frozen_silent;
  cfg.collect_estimates = true;

  Simulator sim(np, pp, WeightMatrix::uniform(1), cfg);
  RunResult r = sim.run();
  CHECK(r.t_end == cfg.horizon_ms);
  CHECK(r.estimates.time_total ==
        doctest::Approx(cfg.horizon_ms - cfg.burn_in_ms).epsilon(1e-9));
}

TEST_CASE("sum tree selects leaves in cumulative-rate order") {
  CHECK_THROWS_AS(SumTree(0), std::invalid_argument);

  SumTree tree(3);
  const double rates[3] = {0.5, 0.0, 1.5};
  tree.rebuild(rates);
  CHECK(tree.leaves() == 3);
  CHECK(tree.total() == 2.0);
  CHECK(tree.leaf(0) == 0.5);
  CHECK(tree.leaf(1) == 0.0);
  CHECK(tree.leaf(2) == 1.5);
  CHECK(tree.sample(0.0) == 0);
  CHECK(tree.sample(0.49) == 0);
  CHECK(tree.sample(0.5) == 2); // the zero-rate leaf is never selected
  CHECK(tree.sample(1.99) == 2);

  tree.update(1, 2.0);
  CHECK(tree.total() == 4.0);
  CHECK(tree.sample(0.6) == 1);
  CHECK(tree.sample(2.4) == 1);
  CHECK(tree.sample(2.6) == 2);
}

TEST_CASE("pairing-protocol curve follows the exponential kernels") {
  PlasticityParams pp;
  pp.a_plus = 1.0;
  pp.a_minus = 0.7;
  pp.tau_plus = 17.0;
  pp.tau_minus = 34.0;
  pp.epsilon = 1e-4;
  pp.delta_w = 1.0;

  const double w0 = 60.0;
  std::vector<double> grid = {-50.0, -1e-9, 1e-9, 17.0, 1e9};
  std::vector<StdpPoint> curve = stdp_curve(pp, grid, 60, w0);
  REQUIRE(curve.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(curve[k].dt_ms == grid[k]);

  // Pre-before-post at the potentiation time constant: one e-fold down.
  CHECK(curve[3].rel_change ==
        doctest::Approx(60.0 * 1e-4 * std::exp(-1.0) / w0).epsilon(1e-12));
  // Post-before-pre: depression kernel with its own amplitude and decay.
  CHECK(curve[0].rel_change ==
        doctest::Approx(-60.0 * 1e-4 * 0.7 * std::exp(-50.0 / 34.0) / w0)
            .epsilon(1e-12));
  // The jump across zero lag has amplitude ratio A+/A-.
  CHECK(curve[2].rel_change / -curve[1].rel_change ==
        doctest::Approx(1.0 / 0.7).epsilon(1e-6));
  // Distant pairings change nothing.
  CHECK(std::abs(curve[4].rel_change) < 1e-300);

  CHECK_THROWS_AS(stdp_curve(pp, {0.0}, 60, w0), std::invalid_argument);
  CHECK_THROWS_AS(stdp_curve(pp, {std::nan("")}, 60, w0), std::invalid_argument);
  CHECK_THROWS_AS(
      stdp_curve(pp, {std::numeric_limits<double>::infinity()}, 60, w0),
      std::invalid_argument);
  CHECK_THROWS_AS(stdp_curve(pp, {1.0}, 0, w0), std::invalid_argument);
  CHECK_THROWS_AS(stdp_curve(pp, {1.0}, 60, 0.0), std::invalid_argument);
}
