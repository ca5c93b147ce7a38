#include "plastnet/fast.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <list>
#include <unordered_map>

namespace plastnet {

SolverDiagnostics& SolverDiagnostics::instance() {
  static SolverDiagnostics diag;
  return diag;
}

namespace {

void note_margin(double margin) {
  auto& d = SolverDiagnostics::instance();
  ++d.systems_built;
  if (!d.any || margin < d.min_dominance_margin) d.min_dominance_margin = margin;
  d.any = true;
  if (margin <= 0.0) {
    ++d.dominance_violations;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "transform system lost strict diagonal dominance (margin %.3e)",
                  margin);
    throw NumericalError(buf);
  }
}

double total_outflow(const RateTable& rt, const SpinEnumeration& sp, int state) {
  double out = 0.0;
  for (int i = 0; i < sp.n(); ++i)
    out += sp.active(state, i) ? rt.beta : rt.up_rate(state, i);
  return out;
}

// Solve the weighted balance system for the transform values at the point
// `lam` >= 0. For every coordinate i with lam[i] > 0, the up-jump inflow
// terms are known from transforms at points of strictly smaller support and
// enter the right-hand side via `known(source_state, i)`; coordinates with
// lam[i] == 0 keep their inflow terms on the left-hand side. Rows are
// strictly diagonally dominant with margin >= |lam| * mu_j (checked).
std::vector<double> solve_point(
    const RateTable& rt, const SpinEnumeration& sp, const std::vector<double>& mu,
    const std::vector<double>& lam,
    const std::function<double(int, int)>& known) {
  const int n = sp.n();
  const int S = sp.size();
  double lam_sum = 0.0;
  for (double l : lam) lam_sum += l;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(S, S);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(S);

  for (int j = 0; j < S; ++j)
    A(j, j) = (total_outflow(rt, sp, j) + lam_sum) * mu[j];

  for (int k = 0; k < S; ++k) {
    const std::uint32_t mk = sp.mask(k);
    for (int i = 0; i < n; ++i) {
      const std::uint32_t bit = 1u << i;
      if (mk & bit) {
        // Down jump k -> k - e_i erases no spike age: same transform point.
        const int j = sp.index(mk ^ bit);
        A(j, k) -= rt.beta * mu[k];
      } else {
        // Up jump k -> k + e_i resets the age of i, zeroing coordinate i of
        // the transform argument.
        const int j = sp.index(mk | bit);
        const double a = rt.up_rate(k, i);
        if (lam[i] == 0.0)
          A(j, k) -= a * mu[k];
        else
          b(j) += a * mu[k] * known(k, i);
      }
    }
  }

  double min_margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < S; ++j) {
    double off = 0.0;
    for (int k = 0; k < S; ++k)
      if (k != j) off += std::abs(A(j, k));
    min_margin = std::min(min_margin, std::abs(A(j, j)) - off);
  }
  note_margin(min_margin);

  Eigen::VectorXd x = A.partialPivLu().solve(b);

  const double resid = (A * x - b).lpNorm<Eigen::Infinity>();
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  if (!(resid <= 1e-10 * scale))
    throw NumericalError("transform solve residual too large");

  std::vector<double> out(static_cast<std::size_t>(S));
  auto& d = SolverDiagnostics::instance();
  for (int j = 0; j < S; ++j) {
    out[static_cast<std::size_t>(j)] = x(j);
    if (!(x(j) > 0.0 && x(j) <= 1.0 + 1e-12)) {
      ++d.value_range_violations;
      throw NumericalError("transform value escaped (0, 1]");
    }
  }
  return out;
}

std::vector<double> ones(int S) {
  return std::vector<double>(static_cast<std::size_t>(S), 1.0);
}

} // namespace

std::vector<double> solve_mu(const RateTable& rt, const SpinEnumeration& sp) {
  const int n = sp.n();
  const int S = sp.size();
  if (n > 12)
    throw std::invalid_argument("solve_mu: dense enumeration capped at 12 neurons");

  // Generator in enumeration order; solve Q^T mu = 0 with the first balance
  // row replaced by the normalisation sum(mu) = 1.
  Eigen::MatrixXd qt = Eigen::MatrixXd::Zero(S, S);
  for (int k = 0; k < S; ++k) {
    const std::uint32_t mk = sp.mask(k);
    double out = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::uint32_t bit = 1u << i;
      const double rate = (mk & bit) ? rt.beta : rt.up_rate(k, i);
      const int tgt = sp.index(mk ^ bit);
      qt(tgt, k) += rate;
      out += rate;
    }
    qt(k, k) -= out;
  }

  Eigen::MatrixXd A = qt;
  A.row(0).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(S);
  b(0) = 1.0;
  Eigen::VectorXd mu = A.partialPivLu().solve(b);

  double qscale = 0.0;
  for (int k = 0; k < S; ++k) qscale = std::max(qscale, std::abs(qt(k, k)));
  const double resid = (qt * mu).lpNorm<Eigen::Infinity>();
  if (!(resid <= 1e-12 * std::max(1.0, qscale)))
    throw NumericalError("stationary solve residual too large");

  std::vector<double> out(static_cast<std::size_t>(S));
  double sum = 0.0;
  for (int k = 0; k < S; ++k) {
    if (!(mu(k) > 0.0))
      throw NumericalError("stationary distribution lost positivity");
    out[static_cast<std::size_t>(k)] = mu(k);
    sum += mu(k);
  }
  if (!(std::abs(sum - 1.0) <= 1e-12))
    throw NumericalError("stationary distribution does not sum to one");
  return out;
}

std::vector<double> laplace_axis(const RateTable& rt, const SpinEnumeration& sp,
                                 const std::vector<double>& mu, int axis,
                                 double lambda) {
  const int n = sp.n();
  if (axis < 0 || axis >= n) throw std::out_of_range("laplace_axis: bad axis");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("laplace_axis: lambda must be finite and >= 0");
  if (static_cast<int>(mu.size()) != sp.size())
    throw std::invalid_argument("laplace_axis: mu size mismatch");
  if (lambda == 0.0) return ones(sp.size());

  std::vector<double> lam(static_cast<std::size_t>(n), 0.0);
  lam[static_cast<std::size_t>(axis)] = lambda;
  // Zeroing the only positive coordinate lands on the all-zero point, whose
  // transform is identically one.
  return solve_point(rt, sp, mu, lam, [](int, int) { return 1.0; });
}

std::vector<double> laplace_general(const RateTable& rt, const SpinEnumeration& sp,
                                    const std::vector<double>& mu,
                                    const std::vector<double>& lambda, int cap) {
  const int n = sp.n();
  if (n > cap)
    throw std::invalid_argument(
        "laplace_general: network larger than the recursion cap");
  if (static_cast<int>(lambda.size()) != n)
    throw std::invalid_argument("laplace_general: lambda size mismatch");
  if (static_cast<int>(mu.size()) != sp.size())
    throw std::invalid_argument("laplace_general: mu size mismatch");
  for (double l : lambda)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw std::invalid_argument(
          "laplace_general: lambda must be finite and >= 0");

  std::uint32_t support = 0;
  for (int i = 0; i < n; ++i)
    if (lambda[static_cast<std::size_t>(i)] > 0.0) support |= 1u << i;

  // Solve at every coordinate-zeroed restriction of lambda, in increasing
  // support size, so each right-hand side only needs already-solved points.
  std::unordered_map<std::uint32_t, std::vector<double>> memo;
  memo.emplace(0u, ones(sp.size()));

  std::vector<std::uint32_t> subsets;
  for (std::uint32_t s = support;; s = (s - 1) & support) {
    if (s != 0) subsets.push_back(s);
    if (s == 0) break;
  }
  std::sort(subsets.begin(), subsets.end(), [](std::uint32_t a, std::uint32_t b) {
    const int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
    return pa != pb ? pa < pb : a < b;
  });

  for (std::uint32_t sub : subsets) {
    std::vector<double> lam(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      if (sub & (1u << i)) lam[static_cast<std::size_t>(i)] = lambda[static_cast<std::size_t>(i)];
    auto known = [&](int state, int i) {
      return memo.at(sub & ~(1u << i))[static_cast<std::size_t>(state)];
    };
    memo.emplace(sub, solve_point(rt, sp, mu, lam, known));
  }
  return memo.at(support);
}

SingleNeuronLaw::SingleNeuronLaw(double alpha, double beta)
    : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("single-neuron law needs positive rates");
  degenerate_ = std::abs(alpha - beta) <= 1e-9 * std::max(alpha, beta);
}

double SingleNeuronLaw::density0(double s) const {
  if (!(s >= 0.0)) throw std::invalid_argument("age must be >= 0");
  if (degenerate_) return alpha_ * alpha_ * s * std::exp(-alpha_ * s);
  return alpha_ * beta_ / (alpha_ - beta_) *
         (std::exp(-beta_ * s) - std::exp(-alpha_ * s));
}

double SingleNeuronLaw::density1(double s) const {
  if (!(s >= 0.0)) throw std::invalid_argument("age must be >= 0");
  return beta_ * std::exp(-beta_ * s);
}

double SingleNeuronLaw::tail(double u) const {
  if (!(u >= 0.0)) throw std::invalid_argument("age must be >= 0");
  if (degenerate_) return (1.0 + alpha_ * u / 2.0) * std::exp(-alpha_ * u);
  return (alpha_ * alpha_ * std::exp(-beta_ * u) -
          beta_ * beta_ * std::exp(-alpha_ * u)) /
         (alpha_ * alpha_ - beta_ * beta_);
}

double SingleNeuronLaw::laplace0(double lambda) const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  return alpha_ * beta_ / ((alpha_ + lambda) * (beta_ + lambda));
}

double SingleNeuronLaw::laplace1(double lambda) const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  return beta_ / (beta_ + lambda);
}

// ---------------------------------------------------------------------------
// FastAnalytics cache

struct FastAnalytics::Entry {
  RateTable rt;
  std::vector<double> mu;
  std::map<std::pair<int, double>, std::vector<double>> axis;
};

namespace {
struct QuantaHash {
  std::size_t operator()(const std::vector<std::int32_t>& q) const {
    std::size_t h = 0x9e3779b97f4a7c15ull ^ q.size();
    for (std::int32_t v : q)
      h = (h ^ static_cast<std::size_t>(static_cast<std::uint32_t>(v))) *
          0x100000001b3ull;
    return h;
  }
};
} // namespace

struct FastAnalytics::Impl {
  using Key = std::vector<std::int32_t>;
  std::list<std::pair<Key, Entry>> order; // front = most recent
  std::unordered_map<Key, std::list<std::pair<Key, Entry>>::iterator, QuantaHash>
      index;
  std::map<int, SpinEnumeration> enums;
};

FastAnalytics::FastAnalytics(const NeuronParams& np, const PlasticityParams& pp,
                             int dense_cap, std::size_t cache_capacity)
    : np_(np), pp_(pp), dense_cap_(dense_cap),
      capacity_(std::max<std::size_t>(1, cache_capacity)),
      impl_(std::make_unique<Impl>()) {
  np_.validate();
  pp_.validate();
  if (dense_cap_ < 1 || dense_cap_ > 12)
    throw std::invalid_argument("dense enumeration cap must lie in [1, 12]");
}

FastAnalytics::~FastAnalytics() = default;

const SpinEnumeration& FastAnalytics::enumeration(int n) {
  auto it = impl_->enums.find(n);
  if (it == impl_->enums.end())
    it = impl_->enums.emplace(n, SpinEnumeration(n)).first;
  return it->second;
}

FastAnalytics::Entry& FastAnalytics::entry(const WeightMatrix& w) {
  if (w.n() > dense_cap_)
    throw std::invalid_argument("network larger than the dense enumeration cap");
  auto key = w.quanta();
  auto it = impl_->index.find(key);
  if (it != impl_->index.end()) {
    ++hits_;
    impl_->order.splice(impl_->order.begin(), impl_->order, it->second);
    return impl_->order.front().second;
  }
  ++misses_;
  const SpinEnumeration& sp = enumeration(w.n());
  Entry e;
  e.rt = make_rate_table(np_, w, pp_.delta_w, sp);
  e.mu = solve_mu(e.rt, sp);
  impl_->order.emplace_front(key, std::move(e));
  impl_->index.emplace(std::move(key), impl_->order.begin());
  if (impl_->order.size() > capacity_) {
    impl_->index.erase(impl_->order.back().first);
    impl_->order.pop_back();
  }
  return impl_->order.front().second;
}

RateTable FastAnalytics::rates(const WeightMatrix& w) { return entry(w).rt; }

std::vector<double> FastAnalytics::mu(const WeightMatrix& w) {
  return entry(w).mu;
}

std::vector<double> FastAnalytics::laplace_axis_values(const WeightMatrix& w,
                                                       int axis, double lambda) {
  Entry& e = entry(w);
  auto key = std::make_pair(axis, lambda);
  auto it = e.axis.find(key);
  if (it == e.axis.end()) {
    const SpinEnumeration& sp = enumeration(w.n());
    it = e.axis.emplace(key, laplace_axis(e.rt, sp, e.mu, axis, lambda)).first;
  }
  return it->second;
}

} // namespace plastnet
