// Independent two-neuron oracle used to gate the general-N analytics
// pipeline. Everything here is written out explicitly for the four activity
// states in the fixed order
//
//   index 0: (v1,v2) = (0,0)   index 1: (0,1)   index 2: (1,0)   index 3: (1,1)
//
// and solved by a local 4x4 Gaussian elimination in long double. No code is
// shared with the library solver: the balance systems below were derived by
// hand from the chain's transition structure, so agreement is meaningful.
//
// Inputs are the five transition rates of the frozen-weight activity chain:
//   beta : common 1 -> 0 rate
//   a01  : 00 -> 01 (neuron 2 turns on, empty network input)
//   a10  : 00 -> 10 (neuron 1 turns on, empty network input)
//   b1   : 01 -> 11 (neuron 1 turns on while neuron 2 is active)
//   b2   : 10 -> 11 (neuron 2 turns on while neuron 1 is active)
#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace oracle2 {

using Vec4 = std::array<double, 4>;

namespace detail {

using LVec = std::array<long double, 4>;
using LMat = std::array<std::array<long double, 4>, 4>;

// Dense 4x4 solve with partial pivoting; throws if the pivot collapses.
inline LVec solve4(LMat a, LVec b) {
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::fabs((double)a[r][col]) > std::fabs((double)a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0L) throw std::runtime_error("oracle2: singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < 4; ++r) {
      const long double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  LVec x{};
  for (int r = 3; r >= 0; --r) {
    long double acc = b[r];
    for (int c = r + 1; c < 4; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

} // namespace detail

struct TwoNeuronOracle {
  double beta = 0.0;
  double a01 = 0.0, a10 = 0.0; // up rates out of (0,0)
  double b1 = 0.0, b2 = 0.0;   // up rates out of (0,1) and (1,0)

  // Stationary distribution of the four-state chain: balance rows
  //   (a01+a10) mu0 = beta mu1 + beta mu2
  //   (b1+beta) mu1 = a01 mu0 + beta mu3
  //   (b2+beta) mu2 = a10 mu0 + beta mu3
  //       2beta mu3 = b1 mu1 + b2 mu2
  // with the first row replaced by normalisation sum(mu) = 1.
  Vec4 mu() const {
    detail::LMat q{};
    q[0] = {1.0L, 1.0L, 1.0L, 1.0L};
    q[1] = {a01, -(b1 + beta), 0.0L, beta};
    q[2] = {a10, 0.0L, -(b2 + beta), beta};
    q[3] = {0.0L, b1, b2, -2.0L * beta};
    detail::LVec rhs = {1.0L, 0.0L, 0.0L, 0.0L};
    auto x = detail::solve4(q, rhs);
    Vec4 out;
    for (int i = 0; i < 4; ++i) out[i] = (double)x[i];
    // The dropped balance row must also hold.
    const double res = (a01 + a10) * out[0] - beta * out[1] - beta * out[2];
    if (std::fabs(res) > 1e-12 * (a01 + a10 + 2 * beta))
      throw std::runtime_error("oracle2: mu residual too large");
    return out;
  }

  // Conditional transforms x_v = E[ exp(-l1 S1 - l2 S2) | V = v ] for the
  // axis case l2 = 0. Weighted balance per state (y_v = mu_v x_v):
  //   state 00: (a01+a10+l1) y0 = beta y1 + beta y2
  //   state 01: (b1+beta+l1) y1 = a01 y0            + beta y3
  //   state 10: (b2+beta+l1) y2 = a10 mu0 * 1       + beta y3
  //   state 11: (2beta+l1)   y3 = b1 mu1 * 1 + b2 y2
  // Up-jumps of neuron 1 reset S1 and therefore enter with the transform of
  // the source law at (0,0), i.e. the known constant 1; up-jumps of neuron 2
  // leave the l1 coordinate alone, so the source value stays an unknown.
  Vec4 lap_axis1(double l1, const Vec4& m) const {
    if (l1 == 0.0) return {1.0, 1.0, 1.0, 1.0};
    detail::LMat a{};
    a[0] = {-(a01 + a10 + l1), beta, beta, 0.0L};
    a[1] = {a01, -(b1 + beta + l1), 0.0L, beta};
    a[2] = {0.0L, 0.0L, -(b2 + beta + l1), beta};
    a[3] = {0.0L, 0.0L, b2, -(2.0L * beta + l1)};
    detail::LVec rhs = {0.0L, 0.0L, -(long double)a10 * m[0], -(long double)b1 * m[1]};
    auto y = detail::solve4(a, rhs);
    Vec4 out;
    for (int i = 0; i < 4; ++i) out[i] = (double)(y[i] / m[i]);
    return out;
  }

  // Same with the roles of the neurons exchanged: x_v = transform at (0, l2).
  Vec4 lap_axis2(double l2, const Vec4& m) const {
    if (l2 == 0.0) return {1.0, 1.0, 1.0, 1.0};
    detail::LMat a{};
    a[0] = {-(a01 + a10 + l2), beta, beta, 0.0L};
    a[1] = {0.0L, -(b1 + beta + l2), 0.0L, beta};
    a[2] = {a10, 0.0L, -(b2 + beta + l2), beta};
    a[3] = {0.0L, b1, 0.0L, -(2.0L * beta + l2)};
    detail::LVec rhs = {0.0L, -(long double)a01 * m[0], 0.0L, -(long double)b2 * m[2]};
    auto y = detail::solve4(a, rhs);
    Vec4 out;
    for (int i = 0; i < 4; ++i) out[i] = (double)(y[i] / m[i]);
    return out;
  }

  // Full two-coordinate transform x_v = E[exp(-l1 S1 - l2 S2) | V = v]. Every
  // up-jump now enters with a *known* boundary value: the source transform
  // with the reset coordinate zeroed, i.e. an axis value from above.
  Vec4 lap_general(double l1, double l2, const Vec4& m) const {
    if (l1 == 0.0) return lap_axis2(l2, m);
    if (l2 == 0.0) return lap_axis1(l1, m);
    const Vec4 ax1 = lap_axis1(l1, m); // values at (l1, 0)
    const Vec4 ax2 = lap_axis2(l2, m); // values at (0, l2)
    const long double lam = (long double)l1 + (long double)l2;
    detail::LMat a{};
    a[0] = {-(a01 + a10 + lam), beta, beta, 0.0L};
    a[1] = {0.0L, -(b1 + beta + lam), 0.0L, beta};
    a[2] = {0.0L, 0.0L, -(b2 + beta + lam), beta};
    a[3] = {0.0L, 0.0L, 0.0L, -(2.0L * beta + lam)};
    detail::LVec rhs = {
        0.0L,
        // into 01: neuron 2 fired from 00, S2 reset -> boundary (l1, 0)
        -(long double)a01 * m[0] * ax1[0],
        // into 10: neuron 1 fired from 00, S1 reset -> boundary (0, l2)
        -(long double)a10 * m[0] * ax2[0],
        // into 11: from 01 neuron 1 fired -> (0, l2); from 10 neuron 2 -> (l1, 0)
        -(long double)b1 * m[1] * ax2[1] - (long double)b2 * m[2] * ax1[2],
    };
    auto y = detail::solve4(a, rhs);
    Vec4 out;
    for (int i = 0; i < 4; ++i) out[i] = (double)(y[i] / m[i]);
    return out;
  }
};

} // namespace oracle2
