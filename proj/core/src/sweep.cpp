#include "plastnet/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>

#include "plastnet/averaged.hpp"
#include "plastnet/rng.hpp"
#include "plastnet/stability.hpp"

namespace plastnet {

namespace {

enum class Target { classify, limit_sup, birth_death, averaged };

Target parse_target(const std::string& s) {
  if (s == "classify") return Target::classify;
  if (s == "limit-sup-drift") return Target::limit_sup;
  if (s == "birth-death") return Target::birth_death;
  if (s == "simulate-averaged") return Target::averaged;
  throw ConfigError("sweep_target must be classify, limit-sup-drift, "
                    "birth-death or simulate-averaged: '" + s + "'");
}

std::vector<std::string> cell_names(Target t) {
  switch (t) {
    case Target::classify:
      return {"ratio", "recurrent_sufficient"};
    case Target::limit_sup:
      return {"sup_eta"};
    case Target::birth_death:
      return {"classification", "k_sat", "r_plus_sat", "r_minus_sat", "tail_bound"};
    case Target::averaged:
      return {"t_end", "events", "final_k_12", "final_k_max"};
  }
  return {};
}

const char* kind_name(BirthDeathKind k) {
  switch (k) {
    case BirthDeathKind::ergodic: return "ergodic";
    case BirthDeathKind::transient: return "transient";
    case BirthDeathKind::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

// Keys whose values are not plain scalars cannot be swept.
bool sweepable(const std::string& key) {
  static const char* const deny[] = {
      "w_init", "mode", "frozen_pairs", "u_grid", "lambda_grid", "dt_grid",
      "sweep_target", "sweep_param", "sweep_values", "sweep_param2",
      "sweep_values2",
  };
  for (const char* d : deny)
    if (key == d) return false;
  return true;
}

std::string sanitize(std::string msg) {
  for (char& c : msg)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return msg;
}

std::vector<std::string> run_point(Target target, const RunConfig& cfg,
                                   std::uint64_t seed) {
  switch (target) {
    case Target::classify: {
      const RecurrenceCondition rc =
          recurrence_condition(cfg.neuron, cfg.plasticity);
      return {fmt17(rc.ratio), rc.recurrent_sufficient ? "1" : "0"};
    }
    case Target::limit_sup: {
      const DriftLimitReport rep =
          limit_sup_drift(cfg.neuron, cfg.plasticity, cfg.grid_points);
      return {fmt17(rep.sup_eta)};
    }
    case Target::birth_death: {
      FastAnalytics fa(cfg.neuron, cfg.plasticity);
      const BirthDeathResult bd = bd_classify(fa, cfg.bd_frozen_k, cfg.k_max);
      return {kind_name(bd.classification), std::to_string(bd.k_sat),
              fmt17(bd.r_plus_sat), fmt17(bd.r_minus_sat), fmt17(bd.tail_bound)};
    }
    case Target::averaged: {
      if (!(cfg.av_horizon > 0.0) || !std::isfinite(cfg.av_horizon))
        throw ConfigError("simulate-averaged sweep needs a finite av_horizon > 0");
      WeightMatrix w0 = build_initial_weights(cfg);
      FastAnalytics fa(cfg.neuron, cfg.plasticity);
      AveragedConfig ac;
      ac.seed = seed;
      ac.horizon = cfg.av_horizon;
      ac.max_events = cfg.av_max_events;
      ac.record_events = false;
      for (auto [i, j] : cfg.frozen_pairs)
        ac.frozen_pairs.emplace_back(i - 1, j - 1);
      const AveragedResult res = simulate_averaged(fa, std::move(w0), ac);
      const int n = res.final_w.n();
      int k12 = 0, kmax = 0;
      if (n >= 2) k12 = res.final_w.k(0, 1);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) kmax = std::max(kmax, res.final_w.k(i, j));
      return {fmt17(res.t_end), std::to_string(res.events),
              std::to_string(k12), std::to_string(kmax)};
    }
  }
  throw ConfigError("unreachable sweep target");
}

} // namespace

SweepOutput run_sweep(const RunConfig& base, int threads) {
  const Target target = parse_target(base.sweep_target);
  if (base.sweep_param.empty())
    throw ConfigError("sweep_param is required");
  if (!sweepable(base.sweep_param))
    throw ConfigError("sweep_param '" + base.sweep_param + "' is not a scalar key");
  if (base.sweep_values.empty())
    throw ConfigError("sweep_values is required");
  const bool two_params = !base.sweep_param2.empty();
  if (two_params && !sweepable(base.sweep_param2))
    throw ConfigError("sweep_param2 '" + base.sweep_param2 + "' is not a scalar key");
  if (two_params && base.sweep_values2.empty())
    throw ConfigError("sweep_values2 is required when sweep_param2 is set");
  if (!two_params && !base.sweep_values2.empty())
    throw ConfigError("sweep_values2 set without sweep_param2");

  // Canonical point order: ascending values, independent of listed order.
  std::vector<double> v1 = base.sweep_values;
  std::sort(v1.begin(), v1.end());
  std::vector<double> v2 = base.sweep_values2;
  std::sort(v2.begin(), v2.end());
  const std::size_t len2 = two_params ? v2.size() : 1;
  const std::size_t points = v1.size() * len2;
  const std::size_t reps = static_cast<std::size_t>(base.replicates);
  const std::size_t jobs = points * reps;

  const std::vector<std::string> cells = cell_names(target);

  SweepOutput out;
  out.header = base.sweep_param;
  if (two_params) out.header += "," + base.sweep_param2;
  if (base.replicates > 1) out.header += ",replicate";
  for (const std::string& c : cells) out.header += "," + c;

  out.rows.assign(jobs, {});
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t job = next.fetch_add(1); job < jobs;
         job = next.fetch_add(1)) {
      const std::size_t point = job / reps;
      const std::size_t rep = job % reps;
      const double p1 = v1[point / len2];
      const double p2 = two_params ? v2[point % len2] : 0.0;

      std::string row = fmt17(p1);
      if (two_params) row += "," + fmt17(p2);
      if (base.replicates > 1) row += "," + std::to_string(rep);

      std::vector<std::string> values;
      try {
        RunConfig cfg = base;
        set_config_key(cfg, base.sweep_param, fmt17(p1));
        if (two_params) set_config_key(cfg, base.sweep_param2, fmt17(p2));
        finalize_config(cfg);
        values = run_point(target, cfg, derive_seed(base.seed, point, rep));
      } catch (const std::exception& e) {
        values.assign(cells.size(), {});
        values[0] = "error:" + sanitize(e.what());
      }
      for (const std::string& v : values) row += "," + v;
      out.rows[job] = std::move(row);
    }
  };

  const std::size_t nt = std::min<std::size_t>(
      std::max(threads, 1), std::max<std::size_t>(jobs, 1));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

} // namespace plastnet
