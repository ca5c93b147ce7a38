// Mutable network state carried by the event-driven simulator: the binary
// activity vector and per-neuron last-spike timestamps. Spike ages are never
// integrated; they are recovered on demand as t - last_spike[i].
#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace plastnet {

struct NetworkState {
  // Sentinel for "never spiked": the derived age comes out +inf, which the
  // pairing kernels map to probability zero.
  static constexpr double kNeverSpiked = -std::numeric_limits<double>::infinity();

  double t = 0.0;
  std::vector<std::uint8_t> v;        // 0/1 activity per neuron
  std::vector<double> last_spike;     // time of the last 0->1 jump

  NetworkState() = default;

  explicit NetworkState(int n)
      : v(static_cast<std::size_t>(ncheck(n)), 0),
        last_spike(static_cast<std::size_t>(n), kNeverSpiked) {}

  int n() const { return static_cast<int>(v.size()); }

  // Age of neuron i's last spike; +inf if it never spiked.
  double age(int i) const { return t - last_spike[static_cast<std::size_t>(i)]; }

  std::vector<double> ages() const {
    std::vector<double> s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = t - last_spike[i];
    return s;
  }

 private:
  static int ncheck(int n) {
    if (n < 1) throw std::invalid_argument("NetworkState: n must be >= 1");
    return n;
  }
};

} // namespace plastnet
