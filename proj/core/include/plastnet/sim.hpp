// Exact event-driven simulation of the coupled (weights, ages, activity)
// process. Between activity flips nothing stochastic happens, so exponential
// waiting times plus rate-proportional selection simulate the law exactly;
// spike ages are recovered from last-spike timestamps on demand.
#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "plastnet/params.hpp"
#include "plastnet/rng.hpp"
#include "plastnet/state.hpp"
#include "plastnet/sum_tree.hpp"
#include "plastnet/weights.hpp"

namespace plastnet {

enum class SimMode {
  plastic,       // weight updates applied
  frozen_shadow, // updates drawn and recorded, never applied
  frozen_silent, // no plasticity at all
};

enum class EventKind : std::uint8_t { up, down, potentiate, depress };

struct EventRecord {
  double t = 0.0;
  EventKind kind = EventKind::up;
  // up/down: i = the flipping neuron, j = -1.
  // potentiate/depress: (i, j) = the weight entry K[i][j] that changed
  // (or would have, in shadow mode).
  std::int32_t i = 0, j = -1;
};

struct SimConfig {
  std::uint64_t seed = 1;
  double horizon_ms = std::numeric_limits<double>::infinity();
  std::uint64_t max_events = UINT64_MAX; // counts activity flips only
  SimMode mode = SimMode::plastic;
  double sample_interval_ms = 0.0; // weight snapshot period; 0 = none
  double burn_in_ms = 0.0;         // discarded from estimators

  bool record_events = false;
  std::uint64_t max_records = 10'000'000; // beyond this, thin by stride doubling

  bool collect_estimates = false; // requires n <= 10
  std::vector<double> u_grid;     // tail estimator grid
  int batch_count = 32;
  std::uint64_t audit_interval = 10'000;

  // Weight entries (i, j) clamped at their initial value: plasticity never
  // generates events for them in any mode. Used to probe one weight's
  // dynamics with its counterpart held fixed.
  std::vector<std::pair<int, int>> frozen_pairs;

  void validate() const;
};

struct EstimateWithSE {
  double value = 0.0;
  double se = 0.0;
  int batches = 0;
};

struct StationaryEstimates {
  int n = 0;
  double time_total = 0.0; // integrated post-burn-in time
  std::vector<double> u_grid;
  // Occupancy indexed by activity bitmask (bit i = neuron i active).
  std::vector<EstimateWithSE> occupancy;
  // tail_uncond[i * n_u + g]: P(S^i > u_g).
  std::vector<EstimateWithSE> tail_uncond;
  // tail_joint[(i * n + j) * n_u + g]: P(S^i > u_g, V^j = 0), i != j.
  std::vector<EstimateWithSE> tail_joint;
  // Rao-Blackwellised shadow rates r^hat_[i][j] on the rescaled clock.
  std::vector<EstimateWithSE> r_plus_hat, r_minus_hat;
  bool insufficient_samples = false;
};

struct WeightSnapshot {
  double t = 0.0;
  std::vector<std::int32_t> quanta; // row-major n*n
};

struct RunResult {
  double t_end = 0.0;
  std::uint64_t events = 0; // activity flips
  std::uint64_t n_up = 0, n_down = 0, n_pot = 0, n_dep = 0;
  WeightMatrix final_w{WeightMatrix::uniform(1, 1)};
  NetworkState final_state{1};
  std::vector<EventRecord> trajectory;
  std::uint64_t record_stride = 1;
  std::vector<WeightSnapshot> snapshots;
  StationaryEstimates estimates;
  std::uint64_t audits = 0;
};

class Simulator {
 public:
  Simulator(const NeuronParams& np, const PlasticityParams& pp, WeightMatrix w0,
            const SimConfig& cfg);
  Simulator(const NeuronParams& np, const PlasticityParams& pp, WeightMatrix w0,
            const SimConfig& cfg, const NetworkState& initial);
  ~Simulator();

  // Advance exactly one activity flip (plus its plasticity side effects).
  EventRecord step();

  // Run to the configured horizon / event budget with estimator, snapshot
  // and audit plumbing; deterministic given the seed.
  RunResult run();

  double t() const { return t_; }
  const WeightMatrix& weights() const { return w_; }
  NetworkState state() const;
  std::uint64_t events() const { return n_up_ + n_down_; }

 private:
  struct Accumulators;

  double rate_of(int i) const;
  void refresh_rates();
  void audit() const;
  void integrate_segment(double a, double b);
  void close_batch();
  void finish_estimates(StationaryEstimates& est) const;
  EventRecord apply_event(int i, double tn,
                          std::vector<EventRecord>* plastic_records);

  NeuronParams np_;
  PlasticityParams pp_;
  SimConfig cfg_;
  WeightMatrix w_;
  int n_;

  double t_ = 0.0;
  std::vector<std::uint8_t> v_;
  std::vector<double> last_spike_;
  std::vector<std::uint8_t> frozen_; // n*n clamp flags from cfg.frozen_pairs
  std::vector<std::int64_t> m_; // incoming active quanta per neuron
  std::vector<double> rates_;
  SumTree tree_;
  std::vector<double> gain_table_; // gain at integer quanta input
  Xoshiro256pp rng_;

  std::uint64_t n_up_ = 0, n_down_ = 0, n_pot_ = 0, n_dep_ = 0;
  std::uint64_t audits_ = 0;

  std::unique_ptr<Accumulators> acc_;
};

// Convenience wrapper: frozen run collecting the stationary estimators.
StationaryEstimates estimate_stationary(const NeuronParams& np,
                                        const PlasticityParams& pp,
                                        const WeightMatrix& w, SimConfig cfg);

// Analytic pairing-protocol curve: expected relative weight change after
// `pairings` pre/post pairs at lag dt (dt > 0: pre leads post). dt = 0 is
// rejected (undefined ordering).
struct StdpPoint {
  double dt_ms = 0.0;
  double rel_change = 0.0;
};
std::vector<StdpPoint> stdp_curve(const PlasticityParams& pp,
                                  const std::vector<double>& dt_grid,
                                  int pairings, double w0);

} // namespace plastnet
