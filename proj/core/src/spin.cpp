#include "plastnet/spin.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace plastnet {

namespace {
// Lexicographic key over (v^1, ..., v^N): v^1 is the most significant digit,
// which is the bit-reversal of the mask within n bits.
std::uint32_t lex_key(std::uint32_t mask, int n) {
  std::uint32_t key = 0;
  for (int i = 0; i < n; ++i)
    if ((mask >> i) & 1u) key |= 1u << (n - 1 - i);
  return key;
}
} // namespace

SpinEnumeration::SpinEnumeration(int n) : n_(n) {
  if (n < 1 || n > 20)
    throw std::invalid_argument("SpinEnumeration: n must be in [1, 20]");
  const std::uint32_t count = 1u << n;
  masks_.resize(count);
  for (std::uint32_t m = 0; m < count; ++m) masks_[m] = m;
  std::sort(masks_.begin(), masks_.end(),
            [n](std::uint32_t a, std::uint32_t b) {
              const int ca = std::popcount(a), cb = std::popcount(b);
              if (ca != cb) return ca < cb;
              return lex_key(a, n) < lex_key(b, n);
            });
  index_.resize(count);
  for (std::uint32_t pos = 0; pos < count; ++pos) index_[masks_[pos]] = static_cast<int>(pos);
}

int SpinEnumeration::active_count(int index) const {
  return std::popcount(masks_[static_cast<std::size_t>(index)]);
}

std::string SpinEnumeration::bitstring(int index) const {
  std::string s(static_cast<std::size_t>(n_), '0');
  const std::uint32_t m = masks_[static_cast<std::size_t>(index)];
  for (int i = 0; i < n_; ++i)
    if ((m >> i) & 1u) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

RateTable make_rate_table(const NeuronParams& np, const WeightMatrix& w,
                          double delta_w, const SpinEnumeration& sp) {
  if (w.n() != sp.n())
    throw std::invalid_argument("make_rate_table: enumeration/weight size mismatch");
  const int n = sp.n();
  RateTable rt;
  rt.n = n;
  rt.beta = np.beta;
  rt.up.assign(static_cast<std::size_t>(sp.size()) * n, 0.0);
  for (int state = 0; state < sp.size(); ++state) {
    const std::uint32_t m = sp.mask(state);
    for (int i = 0; i < n; ++i) {
      if ((m >> i) & 1u) continue;
      double input = 0.0;
      for (int j = 0; j < n; ++j)
        if ((m >> j) & 1u) input += delta_w * w.k(j, i);
      rt.up[static_cast<std::size_t>(state) * n + i] = gain(np, input);
    }
  }
  return rt;
}

} // namespace plastnet
