// Deterministic random number generation. Trajectories use xoshiro256++ with
// splitmix64 state expansion; independent streams for sweep points and
// replicates are derived by hashing (root_seed, point_index, replicate_index)
// through splitmix64, so results are reproducible regardless of scheduling.
// Distributions are hand-inverted from raw 64-bit words instead of going
// through <random>, whose distributions are not bit-stable across platforms.
#pragma once

#include <cmath>
#include <cstdint>

namespace plastnet {

// splitmix64 mixing step (Vigna); also a good 64-bit hash finaliser.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child seed from a root seed and up to two stream coordinates.
// Stream (0, 0) is the root itself, so a one-point, one-replicate sweep is
// bit-identical to the direct command run at the root seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t point,
                                 std::uint64_t replicate = 0) {
  if (point == 0 && replicate == 0) return root;
  std::uint64_t s = root;
  std::uint64_t h = splitmix64(s);
  s ^= 0x632be59bd9b4e019ULL + point;
  h ^= splitmix64(s);
  s ^= 0x9e3779b97f4a7c15ULL + replicate;
  h ^= splitmix64(s);
  return h;
}

// xoshiro256++ (Blackman & Vigna, public domain reference implementation).
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed = 0x2545f4914f6cdd1dULL) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1]; safe as a log argument.
  double uniform01_open_left() { return ((next() >> 11) + 1.0) * 0x1.0p-53; }

  // Exponential waiting time with the given rate (inverse-CDF sampling).
  double exponential(double rate) { return -std::log(uniform01_open_left()) / rate; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Number of failures before the next success of a Bernoulli(p) sequence;
  // used by the geometric-skip thinning loop. p <= 0 never succeeds and
  // overflowing skip counts saturate, both reported as a huge skip.
  std::uint64_t geometric_skip(double p) {
    if (p >= 1.0) return 0;
    if (!(p > 0.0)) return UINT64_MAX / 2;
    const double u = uniform01_open_left();
    const double skips = std::log(u) / std::log1p(-p);
    if (!(skips < 9.0e18)) return UINT64_MAX / 2;
    return static_cast<std::uint64_t>(skips);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

} // namespace plastnet
