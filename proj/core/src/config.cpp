#include "plastnet/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace plastnet {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("value of '" + key + "' is not a number: '" + v + "'");
  }
}

long long to_ll(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("value of '" + key + "' is not an integer: '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    // stoull would wrap a leading minus sign around instead of failing.
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("value of '" + key + "' is not a nonnegative integer: '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_ll(key, v);
  if (x < INT32_MIN || x > INT32_MAX)
    throw ConfigError("value of '" + key + "' out of range: '" + v + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "0" || v == "false") return false;
  if (v == "1" || v == "true") return true;
  throw ConfigError("value of '" + key + "' must be 0/1/true/false: '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  for (const std::string& part : split(v, ','))
    out.push_back(to_double(key, trim(part)));
  return out;
}

std::vector<std::pair<int, int>> to_pairs(const std::string& key,
                                          const std::string& v) {
  std::vector<std::pair<int, int>> out;
  if (trim(v).empty()) return out;
  for (const std::string& part : split(v, ',')) {
    const auto bits = split(trim(part), ':');
    if (bits.size() != 2)
      throw ConfigError("value of '" + key + "' needs i:j pairs: '" + v + "'");
    out.emplace_back(to_int(key, trim(bits[0])), to_int(key, trim(bits[1])));
  }
  return out;
}

SimMode to_mode(const std::string& v) {
  if (v == "plastic") return SimMode::plastic;
  if (v == "frozen-shadow") return SimMode::frozen_shadow;
  if (v == "frozen-silent") return SimMode::frozen_silent;
  throw ConfigError("mode must be plastic, frozen-shadow or frozen-silent: '" + v + "'");
}

const char* mode_name(SimMode m) {
  switch (m) {
    case SimMode::plastic: return "plastic";
    case SimMode::frozen_shadow: return "frozen-shadow";
    case SimMode::frozen_silent: return "frozen-silent";
  }
  return "plastic";
}

void parse_w_init(RunConfig& cfg, const std::string& v) {
  const auto bits = split(v, ':');
  if (bits[0] == "uniform" && bits.size() == 2) {
    cfg.w_init_kind = RunConfig::WInitKind::uniform;
    cfg.w_init_k = to_int("w_init", trim(bits[1]));
    return;
  }
  if (bits[0] == "file" && bits.size() >= 2) {
    cfg.w_init_kind = RunConfig::WInitKind::file;
    cfg.w_init_file = trim(v.substr(5)); // everything after "file:"
    return;
  }
  if (bits[0] == "column-boost" && bits.size() == 3) {
    cfg.w_init_kind = RunConfig::WInitKind::column_boost;
    cfg.w_init_col = to_int("w_init", trim(bits[1]));
    cfg.w_init_col_k = to_int("w_init", trim(bits[2]));
    return;
  }
  throw ConfigError(
      "w_init must be uniform:K, file:PATH or column-boost:COL:K: '" + v + "'");
}

std::string emit_w_init(const RunConfig& cfg) {
  switch (cfg.w_init_kind) {
    case RunConfig::WInitKind::uniform:
      return "uniform:" + std::to_string(cfg.w_init_k);
    case RunConfig::WInitKind::file:
      return "file:" + cfg.w_init_file;
    case RunConfig::WInitKind::column_boost:
      return "column-boost:" + std::to_string(cfg.w_init_col) + ":" +
             std::to_string(cfg.w_init_col_k);
  }
  return "uniform:1";
}

std::string emit_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt17(xs[i]);
  }
  return out;
}

std::string emit_pairs(const std::vector<std::pair<int, int>>& ps) {
  std::string out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ps[i].first) + ":" + std::to_string(ps[i].second);
  }
  return out;
}

// Every known key, in canonical emission order.
const char* const kKeys[] = {
    "beta", "alpha_m", "s0", "sigma", "theta",
    "a_plus", "a_minus", "tau_plus", "tau_minus", "delta_w", "epsilon",
    "n", "w_init",
    "seed", "horizon_ms", "max_events", "mode", "sample_interval_ms",
    "burn_in_ms", "record_events", "max_records", "batch_count",
    "audit_interval",
    "av_horizon", "av_max_events", "frozen_pairs",
    "u_grid", "lambda_grid", "dt_grid",
    "axis", "lambda", "k_max", "bd_frozen_k", "grid_points", "drift_k_max",
    "pairings", "stdp_w0", "gamma",
    "sweep_target", "sweep_param", "sweep_values", "sweep_param2",
    "sweep_values2", "replicates",
};

} // namespace

void set_config_key(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "beta") cfg.neuron.beta = to_double(key, value);
  else if (key == "alpha_m") cfg.neuron.alpha_m = to_double(key, value);
  else if (key == "s0") cfg.neuron.s0 = to_double(key, value);
  else if (key == "sigma") cfg.neuron.sigma = to_double(key, value);
  else if (key == "theta") { cfg.neuron.theta = to_double(key, value); cfg.theta_explicit = true; }
  else if (key == "a_plus") cfg.plasticity.a_plus = to_double(key, value);
  else if (key == "a_minus") cfg.plasticity.a_minus = to_double(key, value);
  else if (key == "tau_plus") cfg.plasticity.tau_plus = to_double(key, value);
  else if (key == "tau_minus") cfg.plasticity.tau_minus = to_double(key, value);
  else if (key == "delta_w") cfg.plasticity.delta_w = to_double(key, value);
  else if (key == "epsilon") cfg.plasticity.epsilon = to_double(key, value);
  else if (key == "n") cfg.n = to_int(key, value);
  else if (key == "w_init") parse_w_init(cfg, value);
  else if (key == "seed") cfg.seed = to_u64(key, value);
  else if (key == "horizon_ms") cfg.horizon_ms = to_double(key, value);
  else if (key == "max_events") cfg.max_events = to_u64(key, value);
  else if (key == "mode") cfg.mode = to_mode(value);
  else if (key == "sample_interval_ms") cfg.sample_interval_ms = to_double(key, value);
  else if (key == "burn_in_ms") cfg.burn_in_ms = to_double(key, value);
  else if (key == "record_events") cfg.record_events = to_bool(key, value);
  else if (key == "max_records") cfg.max_records = to_u64(key, value);
  else if (key == "batch_count") cfg.batch_count = to_int(key, value);
  else if (key == "audit_interval") cfg.audit_interval = to_u64(key, value);
  else if (key == "av_horizon") cfg.av_horizon = to_double(key, value);
  else if (key == "av_max_events") cfg.av_max_events = to_u64(key, value);
  else if (key == "frozen_pairs") cfg.frozen_pairs = to_pairs(key, value);
  else if (key == "u_grid") cfg.u_grid = to_list(key, value);
  else if (key == "lambda_grid") cfg.lambda_grid = to_list(key, value);
  else if (key == "dt_grid") cfg.dt_grid = to_list(key, value);
  else if (key == "axis") cfg.axis = to_int(key, value);
  else if (key == "lambda") cfg.lambda = to_double(key, value);
  else if (key == "k_max") cfg.k_max = to_int(key, value);
  else if (key == "bd_frozen_k") cfg.bd_frozen_k = to_int(key, value);
  else if (key == "grid_points") cfg.grid_points = to_int(key, value);
  else if (key == "drift_k_max") cfg.drift_k_max = to_int(key, value);
  else if (key == "pairings") cfg.pairings = to_int(key, value);
  else if (key == "stdp_w0") cfg.stdp_w0 = to_double(key, value);
  else if (key == "gamma") cfg.gamma = to_double(key, value);
  else if (key == "sweep_target") cfg.sweep_target = trim(value);
  else if (key == "sweep_param") cfg.sweep_param = trim(value);
  else if (key == "sweep_values") cfg.sweep_values = to_list(key, value);
  else if (key == "sweep_param2") cfg.sweep_param2 = trim(value);
  else if (key == "sweep_values2") cfg.sweep_values2 = to_list(key, value);
  else if (key == "replicates") cfg.replicates = to_int(key, value);
  else throw ConfigError("unknown key '" + key + "'");
}

void finalize_config(RunConfig& cfg) {
  try {
    if (!cfg.theta_explicit)
      cfg.neuron.theta = NeuronParams::default_theta(cfg.neuron.s0,
                                                     cfg.neuron.alpha_m,
                                                     cfg.neuron.sigma);
    cfg.neuron.validate();
    cfg.plasticity.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.n < 1 || cfg.n > 100000) throw ConfigError("n must be in [1, 100000]");
  if (cfg.n > 1 && cfg.w_init_k < 1)
    throw ConfigError("uniform initial quanta must be >= 1");
  if (cfg.w_init_kind == RunConfig::WInitKind::column_boost) {
    if (cfg.w_init_col < 1 || cfg.w_init_col > cfg.n)
      throw ConfigError("column-boost column out of range");
    if (cfg.w_init_col_k < 1) throw ConfigError("column-boost quanta must be >= 1");
  }
  if (cfg.batch_count < 2) throw ConfigError("batch_count must be >= 2");
  if (cfg.audit_interval == 0) throw ConfigError("audit_interval must be >= 1");
  if (cfg.max_records == 0) throw ConfigError("max_records must be >= 1");
  if (cfg.axis < 1 || cfg.axis > cfg.n) throw ConfigError("axis out of range");
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda))
    throw ConfigError("lambda must be finite and >= 0");
  if (cfg.k_max < 10) throw ConfigError("k_max must be >= 10");
  if (cfg.bd_frozen_k < 1) throw ConfigError("bd_frozen_k must be >= 1");
  if (cfg.grid_points < 2) throw ConfigError("grid_points must be >= 2");
  if (cfg.drift_k_max < 1) throw ConfigError("drift_k_max must be >= 1");
  if (cfg.pairings < 1) throw ConfigError("pairings must be >= 1");
  if (!(cfg.stdp_w0 > 0.0)) throw ConfigError("stdp_w0 must be > 0");
  if (!(cfg.gamma > 0.0)) throw ConfigError("gamma must be > 0");
  if (cfg.replicates < 1) throw ConfigError("replicates must be >= 1");
  for (std::size_t g = 0; g < cfg.u_grid.size(); ++g) {
    if (!(cfg.u_grid[g] >= 0.0)) throw ConfigError("u_grid values must be >= 0");
    if (g > 0 && !(cfg.u_grid[g] > cfg.u_grid[g - 1]))
      throw ConfigError("u_grid must be strictly increasing");
  }
  for (double l : cfg.lambda_grid)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw ConfigError("lambda_grid values must be finite and >= 0");
  for (auto [i, j] : cfg.frozen_pairs) {
    if (i < 1 || j < 1 || i > cfg.n || j > cfg.n || i == j)
      throw ConfigError("frozen_pairs entries must be distinct neurons in [1, n]");
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    try {
      set_config_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  finalize_config(cfg);
  return cfg;
}

std::vector<std::string> apply_env_overrides(RunConfig& cfg,
                                             const std::string& prefix) {
  std::vector<std::string> applied;
  for (const char* key : kKeys) {
    std::string var = prefix;
    for (const char* c = key; *c; ++c)
      var += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
    if (const char* val = std::getenv(var.c_str())) {
      try {
        set_config_key(cfg, key, val);
      } catch (const ConfigError& e) {
        throw ConfigError(var + ": " + e.what());
      }
      applied.push_back(var);
    }
  }
  if (!applied.empty()) finalize_config(cfg);
  return applied;
}

std::string emit_config(const RunConfig& cfg) {
  std::string out;
  auto kv = [&out](const char* k, const std::string& v) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  };
  kv("beta", fmt17(cfg.neuron.beta));
  kv("alpha_m", fmt17(cfg.neuron.alpha_m));
  kv("s0", fmt17(cfg.neuron.s0));
  kv("sigma", fmt17(cfg.neuron.sigma));
  kv("theta", fmt17(cfg.neuron.theta));
  kv("a_plus", fmt17(cfg.plasticity.a_plus));
  kv("a_minus", fmt17(cfg.plasticity.a_minus));
  kv("tau_plus", fmt17(cfg.plasticity.tau_plus));
  kv("tau_minus", fmt17(cfg.plasticity.tau_minus));
  kv("delta_w", fmt17(cfg.plasticity.delta_w));
  kv("epsilon", fmt17(cfg.plasticity.epsilon));
  kv("n", std::to_string(cfg.n));
  kv("w_init", emit_w_init(cfg));
  kv("seed", std::to_string(cfg.seed));
  kv("horizon_ms", fmt17(cfg.horizon_ms));
  kv("max_events", std::to_string(cfg.max_events));
  kv("mode", mode_name(cfg.mode));
  kv("sample_interval_ms", fmt17(cfg.sample_interval_ms));
  kv("burn_in_ms", fmt17(cfg.burn_in_ms));
  kv("record_events", cfg.record_events ? "1" : "0");
  kv("max_records", std::to_string(cfg.max_records));
  kv("batch_count", std::to_string(cfg.batch_count));
  kv("audit_interval", std::to_string(cfg.audit_interval));
  kv("av_horizon", fmt17(cfg.av_horizon));
  kv("av_max_events", std::to_string(cfg.av_max_events));
  kv("frozen_pairs", emit_pairs(cfg.frozen_pairs));
  kv("u_grid", emit_list(cfg.u_grid));
  kv("lambda_grid", emit_list(cfg.lambda_grid));
  kv("dt_grid", emit_list(cfg.dt_grid));
  kv("axis", std::to_string(cfg.axis));
  kv("lambda", fmt17(cfg.lambda));
  kv("k_max", std::to_string(cfg.k_max));
  kv("bd_frozen_k", std::to_string(cfg.bd_frozen_k));
  kv("grid_points", std::to_string(cfg.grid_points));
  kv("drift_k_max", std::to_string(cfg.drift_k_max));
  kv("pairings", std::to_string(cfg.pairings));
  kv("stdp_w0", fmt17(cfg.stdp_w0));
  kv("gamma", fmt17(cfg.gamma));
  kv("sweep_target", cfg.sweep_target);
  kv("sweep_param", cfg.sweep_param);
  kv("sweep_values", emit_list(cfg.sweep_values));
  kv("sweep_param2", cfg.sweep_param2);
  kv("sweep_values2", emit_list(cfg.sweep_values2));
  kv("replicates", std::to_string(cfg.replicates));
  return out;
}

WeightMatrix build_initial_weights(const RunConfig& cfg) {
  try {
    switch (cfg.w_init_kind) {
      case RunConfig::WInitKind::uniform:
        return WeightMatrix::uniform(cfg.n, cfg.n > 1 ? cfg.w_init_k : 0);
      case RunConfig::WInitKind::column_boost:
        return WeightMatrix::column_boost(cfg.n, cfg.w_init_col - 1,
                                          cfg.w_init_col_k, cfg.w_init_k);
      case RunConfig::WInitKind::file: {
        std::ifstream in(cfg.w_init_file);
        if (!in) throw ConfigError("cannot open weight file '" + cfg.w_init_file + "'");
        std::vector<std::int32_t> quanta;
        std::string line;
        while (std::getline(in, line)) {
          line = trim(line);
          if (line.empty() || line[0] == '#') continue;
          for (const std::string& cell : split(line, ','))
            quanta.push_back(to_int("w_init file", trim(cell)));
        }
        if (quanta.size() != static_cast<std::size_t>(cfg.n) * cfg.n)
          throw ConfigError("weight file '" + cfg.w_init_file + "' has " +
                            std::to_string(quanta.size()) + " entries, expected " +
                            std::to_string(static_cast<std::size_t>(cfg.n) * cfg.n));
        return WeightMatrix::from_quanta(cfg.n, std::move(quanta));
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("initial weights invalid: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(std::string("initial weights invalid: ") + e.what());
  }
  throw ConfigError("unreachable weight-init kind");
}

SimConfig make_sim_config(const RunConfig& cfg) {
  SimConfig sc;
  sc.seed = cfg.seed;
  sc.horizon_ms = cfg.horizon_ms;
  sc.max_events = cfg.max_events;
  sc.mode = cfg.mode;
  sc.sample_interval_ms = cfg.sample_interval_ms;
  sc.burn_in_ms = cfg.burn_in_ms;
  sc.record_events = cfg.record_events;
  sc.max_records = cfg.max_records;
  sc.collect_estimates = cfg.mode != SimMode::plastic && cfg.n <= 10;
  sc.u_grid = cfg.u_grid;
  sc.batch_count = cfg.batch_count;
  sc.audit_interval = cfg.audit_interval;
  sc.frozen_pairs.reserve(cfg.frozen_pairs.size());
  for (auto [i, j] : cfg.frozen_pairs) sc.frozen_pairs.push_back({i - 1, j - 1});
  return sc;
}

} // namespace plastnet
