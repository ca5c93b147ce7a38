// Seeded parallel parameter sweeps over the analytic and averaged-simulation
// entry points, with order-independent deterministic output.
#pragma once

#include <string>
#include <vector>

#include "plastnet/config.hpp"

namespace plastnet {

struct SweepOutput {
  std::string header;            // CSV header line (no trailing newline)
  std::vector<std::string> rows; // sorted CSV data lines
};

// Runs the sweep described by cfg.sweep_* across `threads` workers.
//
// Deterministic by construction: the value grids are put in ascending order,
// the RNG stream of each point x replicate derives from (root seed, canonical
// point index, replicate index), every job writes into its own slot, and the
// rows are sorted lexicographically at the end. The output is therefore
// byte-identical across worker counts and across permutations of the listed
// values. A failure at one point becomes an error cell in that row; the rest
// of the sweep still runs.
SweepOutput run_sweep(const RunConfig& base, int threads = 1);

} // namespace plastnet
