// Flat key=value run configuration: parsing with first-error line reporting,
// environment-variable overrides, canonical emission for round-tripping, and
// initial-weight construction.
#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "plastnet/params.hpp"
#include "plastnet/sim.hpp"
#include "plastnet/weights.hpp"

namespace plastnet {

// Invalid configuration input (unknown key, bad value, broken invariant).
// Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  NeuronParams neuron;
  PlasticityParams plasticity;
  bool theta_explicit = false; // theta re-derives from (s0, alpha_m, sigma) if not set

  int n = 2;

  enum class WInitKind { uniform, file, column_boost };
  WInitKind w_init_kind = WInitKind::uniform;
  std::int32_t w_init_k = 1;   // uniform quanta
  std::string w_init_file;     // file:PATH
  int w_init_col = 1;          // column-boost target neuron (1-based)
  std::int32_t w_init_col_k = 1;

  // Full-simulator controls.
  std::uint64_t seed = 1;
  double horizon_ms = std::numeric_limits<double>::infinity();
  std::uint64_t max_events = UINT64_MAX;
  SimMode mode = SimMode::plastic;
  double sample_interval_ms = 0.0;
  double burn_in_ms = 0.0;
  bool record_events = false;
  std::uint64_t max_records = 10'000'000;
  int batch_count = 32;
  std::uint64_t audit_interval = 10'000;

  // Averaged-simulator controls (rescaled clock).
  double av_horizon = 0.0;
  std::uint64_t av_max_events = UINT64_MAX;
  std::vector<std::pair<int, int>> frozen_pairs; // 1-based in config text

  // Analysis grids and knobs.
  std::vector<double> u_grid;
  std::vector<double> lambda_grid;
  std::vector<double> dt_grid;
  int axis = 1;          // 1-based axis neuron for transform output
  double lambda = 1.0;   // transform evaluation point
  int k_max = 200;       // birth-death truncation
  int bd_frozen_k = 25;  // frozen reverse weight (quanta)
  int grid_points = 257; // drift-envelope grid resolution
  int drift_k_max = 40;  // drift-field lattice bound
  int pairings = 60;     // pairing-protocol repetitions
  double stdp_w0 = 1.0;  // pairing-protocol reference weight
  double gamma = 0.1;    // transience margin

  // Sweep controls.
  std::string sweep_target; // birth-death | classify | limit-sup-drift | simulate-averaged
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::string sweep_param2;
  std::vector<double> sweep_values2;
  int replicates = 1;
};

// Assigns one key; throws ConfigError on unknown key or unparsable value.
void set_config_key(RunConfig& cfg, const std::string& key,
                    const std::string& value);

// Re-derives dependent defaults (theta) and validates everything.
void finalize_config(RunConfig& cfg);

// Parses key=value text ('#' comments). First error is reported with its
// 1-based line number. Returns a finalized config.
RunConfig parse_config(const std::string& text);

// Applies environment overrides PREFIX<KEY>=value (key upper-cased) for
// every known key, then re-finalizes. Returns the overridden keys.
std::vector<std::string> apply_env_overrides(RunConfig& cfg,
                                             const std::string& prefix = "PLASTNET_");

// Canonical emission; parse(emit(cfg)) reproduces cfg exactly.
std::string emit_config(const RunConfig& cfg);

// Resolves the initial-weights spec (reads the matrix file if needed).
WeightMatrix build_initial_weights(const RunConfig& cfg);

// Floating-point text with 17 significant digits (round-trip exact).
std::string fmt17(double v);

SimConfig make_sim_config(const RunConfig& cfg);

} // namespace plastnet
