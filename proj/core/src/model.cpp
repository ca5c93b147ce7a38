#include "plastnet/model.hpp"

#include <stdexcept>

namespace plastnet {

double neuron_rate(const NeuronParams& np, const WeightMatrix& w, double delta_w,
                   const std::vector<std::uint8_t>& v, int i) {
  const int n = w.n();
  if (static_cast<int>(v.size()) != n)
    throw std::invalid_argument("neuron_rate: v has wrong length");
  if (i < 0 || i >= n) throw std::out_of_range("neuron_rate: bad neuron index");
  double input = 0.0;
  for (int j = 0; j < n; ++j)
    if (v[static_cast<std::size_t>(j)]) input += delta_w * w.k(j, i);
  return gain(np, input);
}

double config_probability(const PlasticityParams& pp, const WeightMatrix& w,
                          int i, const std::vector<double>& s,
                          const std::vector<std::uint8_t>& zeta_p,
                          const std::vector<std::uint8_t>& zeta_d,
                          double epsilon) {
  const int n = w.n();
  if (i < 0 || i >= n) throw std::out_of_range("config_probability: bad index");
  if (static_cast<int>(s.size()) != n || static_cast<int>(zeta_p.size()) != n ||
      static_cast<int>(zeta_d.size()) != n)
    throw std::invalid_argument("config_probability: vector length mismatch");
  if (!(epsilon > 0.0 && epsilon <= 1.0) ||
      epsilon * pp.a_plus > 1.0 || epsilon * pp.a_minus > 1.0)
    throw std::invalid_argument("config_probability: invalid epsilon scale");
  if (zeta_p[static_cast<std::size_t>(i)] || zeta_d[static_cast<std::size_t>(i)])
    throw std::invalid_argument("config_probability: self entries must be 0");

  double prob = 1.0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const auto ju = static_cast<std::size_t>(j);
    if (zeta_d[ju] && w.k(i, j) <= 1)
      throw std::invalid_argument(
          "config_probability: depression marked on a floor weight");
    const double up = epsilon * p_plus(pp, s[ju]);
    const double dn = epsilon * p_minus(pp, s[ju]);
    prob *= zeta_p[ju] ? up : (1.0 - up);
    // A floor weight cannot depress, so its no-depression branch has
    // probability one rather than 1 - dn.
    if (w.k(i, j) > 1) prob *= zeta_d[ju] ? dn : (1.0 - dn);
  }
  return prob;
}

} // namespace plastnet
