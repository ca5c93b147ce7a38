// Model-level pointwise functions combining parameters, weights, and state:
// per-neuron firing rates and the probability of a given plasticity
// configuration at a spike.
#pragma once

#include <cstdint>
#include <vector>

#include "plastnet/params.hpp"
#include "plastnet/weights.hpp"

namespace plastnet {

// Firing rate of neuron i: gain of its summed active weighted input
// sum_j delta_w * k(j, i) * v_j.
double neuron_rate(const NeuronParams& np, const WeightMatrix& w, double delta_w,
                   const std::vector<std::uint8_t>& v, int i);

// Probability that the spike of neuron i realises exactly the plasticity
// configuration (zeta_p, zeta_d): zeta_p[j] = 1 iff the incoming weight j->i
// potentiates, zeta_d[j] = 1 iff the outgoing weight i->j depresses. Ages `s`
// are the pre-spike values; epsilon scales both kernels (epsilon = 1 recovers
// the unscaled rule). Self entries must be 0, and zeta_d[j] must be 0 wherever
// k(i, j) sits at the one-quantum floor.
double config_probability(const PlasticityParams& pp, const WeightMatrix& w,
                          int i, const std::vector<double>& s,
                          const std::vector<std::uint8_t>& zeta_p,
                          const std::vector<std::uint8_t>& zeta_d,
                          double epsilon);

} // namespace plastnet
