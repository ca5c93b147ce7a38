// plastnet: command-line front end for the exact simulator, the averaged
// weight dynamics, the stationary-law analytics and the stability checkers.
//
// Every command reads a flat key=value config (all keys optional), applies
// PLASTNET_* environment overrides, writes fixed-schema CSV/structured-text
// files into --out, and prints a one-line summary.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plastnet/averaged.hpp"
#include "plastnet/config.hpp"
#include "plastnet/fast.hpp"
#include "plastnet/sim.hpp"
#include "plastnet/stability.hpp"
#include "plastnet/sweep.hpp"

namespace {

using namespace plastnet;

struct CliArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  bool quiet = false;
};

RunConfig load_config(const CliArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw ConfigError("cannot open config file '" + args.config_path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    cfg = parse_config(text.str());
  } else {
    finalize_config(cfg); // defaults
  }
  apply_env_overrides(cfg);
  if (args.seed_set) cfg.seed = args.seed;
  return cfg;
}

std::filesystem::path out_path(const CliArgs& args, const std::string& name) {
  std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out.good())
    throw std::runtime_error("failed to write '" + path.string() + "'");
}

void say(const CliArgs& args, const std::string& line) {
  if (!args.quiet) std::cout << line << "\n";
}

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::up: return "UP";
    case EventKind::down: return "DOWN";
    case EventKind::potentiate: return "POT";
    case EventKind::depress: return "DEP";
  }
  return "UP";
}

std::string mask_bits(std::uint32_t mask, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if ((mask >> i) & 1u) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

std::string weights_csv(const WeightMatrix& w) {
  std::string csv = "i,j,K\n";
  for (int i = 0; i < w.n(); ++i)
    for (int j = 0; j < w.n(); ++j)
      if (i != j)
        csv += std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
               std::to_string(w.k(i, j)) + "\n";
  return csv;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_simulate_full(const CliArgs& args) {
  const RunConfig cfg = load_config(args);
  WeightMatrix w0 = build_initial_weights(cfg);
  Simulator sim(cfg.neuron, cfg.plasticity, std::move(w0), make_sim_config(cfg));
  const RunResult res = sim.run();

  write_text(out_path(args, "final_weights.csv"), weights_csv(res.final_w));

  if (cfg.record_events) {
    std::string csv = "time_ms,kind,i,j\n";
    for (const EventRecord& e : res.trajectory)
      csv += fmt17(e.t) + "," + kind_name(e.kind) + "," +
             std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) + "\n";
    write_text(out_path(args, "trajectory.csv"), csv);
  }

  if (!res.snapshots.empty()) {
    std::string csv = "time_ms,i,j,K\n";
    for (const WeightSnapshot& snap : res.snapshots)
      for (int i = 0; i < res.final_w.n(); ++i)
        for (int j = 0; j < res.final_w.n(); ++j)
          if (i != j)
            csv += fmt17(snap.t) + "," + std::to_string(i + 1) + "," +
                   std::to_string(j + 1) + "," +
                   std::to_string(snap.quanta[static_cast<std::size_t>(i) *
                                                  res.final_w.n() + j]) + "\n";
    write_text(out_path(args, "snapshots.csv"), csv);
  }

  const StationaryEstimates& est = res.estimates;
  if (est.n > 0) {
    std::string txt;
    txt += "time_total " + fmt17(est.time_total) + "\n";
    txt += "insufficient_samples " + std::string(est.insufficient_samples ? "1" : "0") + "\n";
    const int n = est.n;
    const std::size_t nu = est.u_grid.size();
    for (std::size_t m = 0; m < est.occupancy.size(); ++m)
      txt += "occupancy " + mask_bits(static_cast<std::uint32_t>(m), n) + " " +
             fmt17(est.occupancy[m].value) + " " + fmt17(est.occupancy[m].se) + "\n";
    for (int i = 0; i < n; ++i)
      for (std::size_t g = 0; g < nu; ++g) {
        const EstimateWithSE& e = est.tail_uncond[static_cast<std::size_t>(i) * nu + g];
        txt += "tail " + std::to_string(i + 1) + " " + fmt17(est.u_grid[g]) +
               " " + fmt17(e.value) + " " + fmt17(e.se) + "\n";
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        for (std::size_t g = 0; g < nu; ++g) {
          const EstimateWithSE& e =
              est.tail_joint[(static_cast<std::size_t>(i) * n + j) * nu + g];
          txt += "tail_joint " + std::to_string(i + 1) + " " + std::to_string(j + 1) +
                 " " + fmt17(est.u_grid[g]) + " " + fmt17(e.value) + " " +
                 fmt17(e.se) + "\n";
        }
      }
    if (cfg.mode == SimMode::frozen_shadow) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          const EstimateWithSE& p = est.r_plus_hat[static_cast<std::size_t>(i) * n + j];
          const EstimateWithSE& m = est.r_minus_hat[static_cast<std::size_t>(i) * n + j];
          txt += "r_plus_hat " + std::to_string(i + 1) + " " + std::to_string(j + 1) +
                 " " + fmt17(p.value) + " " + fmt17(p.se) + "\n";
          txt += "r_minus_hat " + std::to_string(i + 1) + " " + std::to_string(j + 1) +
                 " " + fmt17(m.value) + " " + fmt17(m.se) + "\n";
        }
    }
    write_text(out_path(args, "estimates.txt"), txt);
  }

  say(args, "simulate-full: " + std::to_string(res.events) + " flips (" +
                std::to_string(res.n_up) + " up, " + std::to_string(res.n_down) +
                " down), " + std::to_string(res.n_pot) + " pot, " +
                std::to_string(res.n_dep) + " dep, t_end=" + fmt17(res.t_end) +
                " ms -> " + args.out_dir);
}

void cmd_simulate_averaged(const CliArgs& args) {
  const RunConfig cfg = load_config(args);
  if (!(cfg.av_horizon > 0.0) || !std::isfinite(cfg.av_horizon))
    throw ConfigError("simulate-averaged needs a finite av_horizon > 0");
  WeightMatrix w0 = build_initial_weights(cfg);
  FastAnalytics fa(cfg.neuron, cfg.plasticity);
  AveragedConfig ac;
  ac.seed = cfg.seed;
  ac.horizon = cfg.av_horizon;
  ac.max_events = cfg.av_max_events;
  ac.record_events = cfg.record_events;
  for (auto [i, j] : cfg.frozen_pairs) ac.frozen_pairs.emplace_back(i - 1, j - 1);
  const AveragedResult res = simulate_averaged(fa, std::move(w0), ac);

  write_text(out_path(args, "final_weights.csv"), weights_csv(res.final_w));
  if (cfg.record_events) {
    std::string csv = "time,i,j,delta\n";
    for (const AveragedEvent& e : res.trajectory)
      csv += fmt17(e.t) + "," + std::to_string(e.i + 1) + "," +
             std::to_string(e.j + 1) + "," + std::to_string(e.delta) + "\n";
    write_text(out_path(args, "averaged_trajectory.csv"), csv);
  }

  int kmax = 0;
  for (int i = 0; i < res.final_w.n(); ++i)
    for (int j = 0; j < res.final_w.n(); ++j)
      if (i != j) kmax = std::max(kmax, res.final_w.k(i, j));
  say(args, "simulate-averaged: " + std::to_string(res.events) +
                " jumps, t_end=" + fmt17(res.t_end) +
                ", max K=" + std::to_string(kmax) + " -> " + args.out_dir);
}

void cmd_analyze_fast(const CliArgs& args) {
  const RunConfig cfg = load_config(args);
  WeightMatrix w = build_initial_weights(cfg);
  FastAnalytics fa(cfg.neuron, cfg.plasticity);
  const std::vector<double> mu = fa.mu(w);
  const std::vector<double> values =
      fa.laplace_axis_values(w, cfg.axis - 1, cfg.lambda);
  const SpinEnumeration& sp = fa.enumeration(cfg.n);

  std::string csv = "v_bitstring,mu,value\n";
  double mu_sum = 0.0;
  for (int s = 0; s < sp.size(); ++s) {
    mu_sum += mu[static_cast<std::size_t>(s)];
    csv += sp.bitstring(s) + "," + fmt17(mu[static_cast<std::size_t>(s)]) + "," +
           fmt17(values[static_cast<std::size_t>(s)]) + "\n";
  }
  write_text(out_path(args, "transforms.csv"), csv);
  say(args, "analyze-fast: n=" + std::to_string(cfg.n) + ", axis=" +
                std::to_string(cfg.axis) + ", lambda=" + fmt17(cfg.lambda) +
                ", mu_sum=" + fmt17(mu_sum) + " -> " + args.out_dir);
}

void cmd_birth_death(const CliArgs& args) {
  const RunConfig cfg = load_config(args);
  FastAnalytics fa(cfg.neuron, cfg.plasticity);
  const BirthDeathResult bd = bd_classify(fa, cfg.bd_frozen_k, cfg.k_max);

  std::string csv = "k,r_plus,r_minus,theta\n";
  for (int k = 1; k <= bd.k_max; ++k) {
    csv += std::to_string(k) + "," + fmt17(bd.r_plus[static_cast<std::size_t>(k - 1)]) +
           "," + fmt17(bd.r_minus[static_cast<std::size_t>(k - 1)]) + ",";
    if (!bd.theta.empty()) csv += fmt17(bd.theta[static_cast<std::size_t>(k - 1)]);
    csv += "\n";
  }
  write_text(out_path(args, "bd_levels.csv"), csv);

  const char* cls = bd.classification == BirthDeathKind::ergodic ? "ergodic"
                    : bd.classification == BirthDeathKind::transient ? "transient"
                                                                     : "inconclusive";
  say(args, std::string("birth-death: ") + cls + " (k_sat=" +
                std::to_string(bd.k_sat) + ", R+=" + fmt17(bd.r_plus_sat) +
                ", R-=" + fmt17(bd.r_minus_sat) + ", tail_bound=" +
                fmt17(bd.tail_bound) + ") -> " + args.out_dir);
}

void cmd_drift_field(const CliArgs& args) {
  const RunConfig cfg = load_config(args);
  if (cfg.n != 2) throw ConfigError("drift-field requires n=2");
  FastAnalytics fa(cfg.neuron, cfg.plasticity);

  std::string csv = "w12,w21,eta12,eta21\n";
  int positive = 0;
  for (std::int32_t w12 = 1; w12 <= cfg.drift_k_max; ++w12)
    for (std::int32_t w21 = 1; w21 <= cfg.drift_k_max; ++w21) {
      const WeightMatrix w = WeightMatrix::from_quanta(2, {0, w12, w21, 0});
      const DriftField df = drift_field(fa, w);
      if (df.at(0, 1) > 0.0) ++positive;
      csv += std::to_string(w12) + "," + std::to_string(w21) + "," +
             fmt17(df.at(0, 1)) + "," + fmt17(df.at(1, 0)) + "\n";
    }
  write_text(out_path(args, "drift_field.csv"), csv);
  say(args, "drift-field: " + std::to_string(cfg.drift_k_max) + "x" +
                std::to_string(cfg.drift_k_max) + " lattice, eta12>0 at " +
                std::to_string(positive) + " points -> " + args.out_dir);
}

void cmd_stdp_curve(const CliArgs& args) {
  const RunConfig cfg = load_config(args);
  std::vector<double> grid = cfg.dt_grid;
  if (grid.empty()) {
    for (int d = -50; d <= 50; ++d)
      if (d != 0) grid.push_back(static_cast<double>(d));
  }
  const std::vector<StdpPoint> pts =
      stdp_curve(cfg.plasticity, grid, cfg.pairings, cfg.stdp_w0);

  std::string csv = "dt_ms,rel_change\n";
  for (const StdpPoint& p : pts)
    csv += fmt17(p.dt_ms) + "," + fmt17(p.rel_change) + "\n";
  write_text(out_path(args, "stdp_curve.csv"), csv);
  say(args, "stdp-curve: " + std::to_string(pts.size()) + " lags, pairings=" +
                std::to_string(cfg.pairings) + " -> " + args.out_dir);
}

void cmd_bounds_check(const CliArgs& args) {
  const RunConfig cfg = load_config(args);
  std::vector<double> grid = cfg.u_grid;
  if (grid.empty()) {
    // 20 log-spaced ages covering both fast and slow decay scales.
    const double lo = std::log(0.5), hi = std::log(100.0);
    for (int g = 0; g < 20; ++g)
      grid.push_back(std::exp(lo + (hi - lo) * g / 19.0));
  }
  const BoundsReport rep =
      make_bounds_report(cfg.neuron, cfg.plasticity, grid, cfg.gamma);

  std::string txt;
  txt += "mu_sum_lower " + fmt17(rep.mu_sum_lower) + "\n";
  txt += "mu_sum_upper " + fmt17(rep.mu_sum_upper) + "\n";
  txt += "r_plus_lower " + fmt17(rep.envelopes.plus_lower) + "\n";
  txt += "r_plus_upper " + fmt17(rep.envelopes.plus_upper) + "\n";
  txt += "r_minus_lower " + fmt17(rep.envelopes.minus_lower) + "\n";
  txt += "r_minus_upper " + fmt17(rep.envelopes.minus_upper) + "\n";
  txt += "condition_ratio " + fmt17(rep.condition_ratio) + "\n";
  txt += std::string("recurrent_sufficient ") + (rep.recurrent_sufficient ? "1" : "0") + "\n";
  txt += std::string("transient_sufficient ") + (rep.transient_sufficient ? "1" : "0") + "\n";
  txt += "gamma " + fmt17(rep.gamma) + "\n";
  write_text(out_path(args, "bounds.txt"), txt);

  std::string csv = "u,tail_lower,tail_upper\n";
  for (std::size_t g = 0; g < rep.u_grid.size(); ++g)
    csv += fmt17(rep.u_grid[g]) + "," + fmt17(rep.tail_lower[g]) + "," +
           fmt17(rep.tail_upper[g]) + "\n";
  write_text(out_path(args, "tail_bounds.csv"), csv);

  say(args, "bounds-check: ratio=" + fmt17(rep.condition_ratio) +
                ", recurrent_sufficient=" + (rep.recurrent_sufficient ? "1" : "0") +
                ", transient_sufficient=" + (rep.transient_sufficient ? "1" : "0") +
                " -> " + args.out_dir);
}

void cmd_classify(const CliArgs& args) {
  const RunConfig cfg = load_config(args);
  const RecurrenceCondition rc = recurrence_condition(cfg.neuron, cfg.plasticity);
  const bool transient = transience_condition(cfg.plasticity, cfg.gamma);
  // The classification line is the command's output; --quiet does not apply.
  std::cout << "classify: ratio=" << fmt17(rc.ratio)
            << " recurrent_sufficient=" << (rc.recurrent_sufficient ? 1 : 0)
            << " transient_sufficient=" << (transient ? 1 : 0) << "\n";
}

void cmd_sweep(const CliArgs& args) {
  const RunConfig cfg = load_config(args);
  const SweepOutput out = run_sweep(cfg, args.threads);
  std::string csv = out.header + "\n";
  for (const std::string& row : out.rows) csv += row + "\n";
  write_text(out_path(args, "sweep.csv"), csv);
  say(args, "sweep: target=" + cfg.sweep_target + ", " +
                std::to_string(out.rows.size()) + " rows -> " + args.out_dir);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"plastnet: exact and averaged dynamics of a plastic binary-neuron network"};
  app.require_subcommand(1);
  app.fallthrough();

  CliArgs args;
  app.add_option("--config", args.config_path, "key=value config file");
  auto* seed_opt = app.add_option("--seed", args.seed, "root RNG seed (overrides config)");
  app.add_option("--out", args.out_dir, "output directory (default .)");
  app.add_option("--threads", args.threads, "worker threads for sweep")
      ->check(CLI::Range(1, 1024));
  app.add_flag("--quiet", args.quiet, "suppress the summary line");

  const std::vector<std::pair<const char*, std::function<void(const CliArgs&)>>>
      commands = {
          {"simulate-full", cmd_simulate_full},
          {"simulate-averaged", cmd_simulate_averaged},
          {"analyze-fast", cmd_analyze_fast},
          {"birth-death", cmd_birth_death},
          {"drift-field", cmd_drift_field},
          {"stdp-curve", cmd_stdp_curve},
          {"bounds-check", cmd_bounds_check},
          {"classify", cmd_classify},
          {"sweep", cmd_sweep},
      };
  for (const auto& [name, fn] : commands) app.add_subcommand(name, "");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  args.seed_set = seed_opt->count() > 0;

  try {
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) {
        fn(args);
        return 0;
      }
    std::cerr << "config error: no command selected\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
