#include "zk/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "zk/errors.hpp"

namespace zk {

namespace {

constexpr double kSumTolerance = 1e-9;

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

void check_same_dim(const Dist& p, const Dist& q, const char* what) {
  if (p.dim() != q.dim()) {
    throw DimensionError(std::string(what) + ": dimensions " + std::to_string(p.dim()) + " and " +
                         std::to_string(q.dim()) + " differ");
  }
}

}  // namespace

Dist::Dist(int n, std::vector<double> probs) : n_(n), p_(std::move(probs)) {
  if (p_.size() != state_count(n)) {
    throw DimensionError("Dist: expected " + std::to_string(state_count(n)) + " entries, got " +
                         std::to_string(p_.size()));
  }
  double sum = 0.0;
  for (double& v : p_) {
    if (!std::isfinite(v)) throw std::invalid_argument("Dist: non-finite probability");
    if (v < 0.0) {
      if (v < -1e-12) throw std::invalid_argument("Dist: negative probability");
      v = 0.0;
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("Dist: probabilities sum to " + std::to_string(sum));
  }
  for (double& v : p_) v /= sum;
}

Dist Dist::uniform(int n) {
  const std::size_t count = state_count(n);
  return Dist(n, std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

Dist Dist::point(int n, StateIndex x) {
  std::vector<double> p(state_count(n), 0.0);
  if (x >= p.size()) throw std::out_of_range("Dist::point: state out of range");
  p[x] = 1.0;
  return Dist(n, std::move(p));
}

Dist Dist::from_log_weights(int n, std::span<const double> log_weights) {
  if (log_weights.size() != state_count(n)) throw DimensionError("Dist: log-weight size mismatch");
  double top = -std::numeric_limits<double>::infinity();
  for (double w : log_weights) {
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("Dist: invalid log-weight");
    }
    top = std::max(top, w);
  }
  if (!std::isfinite(top)) throw std::invalid_argument("Dist: all log-weights are -inf");
  std::vector<double> p(log_weights.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(log_weights[i] - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return Dist(n, std::move(p));
}

Dist Dist::from_weights(int n, std::span<const double> weights) {
  if (weights.size() != state_count(n)) throw DimensionError("Dist: weight size mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("Dist: invalid weight");
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("Dist: weights sum to zero");
  std::vector<double> p(weights.begin(), weights.end());
  for (double& v : p) v /= sum;
  return Dist(n, std::move(p));
}

std::vector<StateIndex> Dist::support(double tol) const {
  std::vector<StateIndex> out;
  for (std::size_t x = 0; x < p_.size(); ++x)
    if (p_[x] > tol) out.push_back(static_cast<StateIndex>(x));
  return out;
}

DirichletParams::DirichletParams(int n_, std::vector<double> alpha_) : n(n_), alpha(std::move(alpha_)) {
  if (alpha.size() != state_count(n)) throw DimensionError("DirichletParams: size mismatch");
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("DirichletParams: concentrations must be positive");
    }
  }
}

DirichletParams DirichletParams::symmetric(int n, double concentration) {
  return DirichletParams(n, std::vector<double>(state_count(n), concentration));
}

Code::Code(int n, std::vector<StateIndex> members) : n_(n), members_(std::move(members)) {
  const std::size_t count = state_count(n);
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw std::invalid_argument("Code: duplicate member");
  }
  if (!members_.empty() && members_.back() >= count) throw std::out_of_range("Code: member out of range");
}

bool Code::contains(StateIndex x) const {
  return std::binary_search(members_.begin(), members_.end(), x);
}

double total_variation(const Dist& p, const Dist& q) {
  check_same_dim(p, q, "total_variation");
  double s = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) s += std::abs(p[x] - q[x]);
  return 0.5 * s;
}

double sup_norm(const Dist& p, const Dist& q) {
  check_same_dim(p, q, "sup_norm");
  double s = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) s = std::max(s, std::abs(p[x] - q[x]));
  return s;
}

Dist product_distribution(const NaturalParams& B) {
  const int n = static_cast<int>(B.size());
  const std::size_t count = state_count(n);
  std::vector<double> log_on(n), log_off(n);
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(B[i])) throw std::invalid_argument("product_distribution: non-finite parameter");
    log_on[i] = -softplus(-B[i]);
    log_off[i] = -softplus(B[i]);
  }
  std::vector<double> p(count);
  for (std::size_t v = 0; v < count; ++v) {
    double lp = 0.0;
    for (int i = 0; i < n; ++i) lp += ((v >> i) & 1u) ? log_on[i] : log_off[i];
    p[v] = std::exp(lp);
  }
  return Dist(n, std::move(p));
}

std::vector<double> marginals(const Dist& p) {
  std::vector<double> m(p.dim(), 0.0);
  for (std::size_t v = 0; v < p.size(); ++v) {
    for (int i = 0; i < p.dim(); ++i)
      if ((v >> i) & 1u) m[i] += p[v];
  }
  return m;
}

double product_defect(const Dist& p) {
  const auto m = marginals(p);
  double worst = 0.0;
  for (std::size_t v = 0; v < p.size(); ++v) {
    double q = 1.0;
    for (int i = 0; i < p.dim(); ++i) q *= ((v >> i) & 1u) ? m[i] : 1.0 - m[i];
    worst = std::max(worst, std::abs(q - p[v]));
  }
  return worst;
}

NaturalParams product_natural_params(const Dist& p, double clamp) {
  const auto m = marginals(p);
  NaturalParams B(p.dim());
  for (int i = 0; i < p.dim(); ++i) {
    const double on = std::clamp(m[i], 0.0, 1.0);
    double logit;
    if (on <= 0.0) {
      logit = -clamp;
    } else if (on >= 1.0) {
      logit = clamp;
    } else {
      logit = std::log(on) - std::log1p(-on);
    }
    B[i] = std::clamp(logit, -clamp, clamp);
  }
  return B;
}

Dist mixture(std::span<const Dist> components, std::span<const double> weights) {
  if (components.empty()) throw std::invalid_argument("mixture: no components");
  if (components.size() != weights.size()) throw std::invalid_argument("mixture: weight count mismatch");
  const int n = components.front().dim();
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mixture: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > kSumTolerance) throw std::invalid_argument("mixture: weights do not sum to 1");
  std::vector<double> p(components.front().size(), 0.0);
  for (std::size_t k = 0; k < components.size(); ++k) {
    if (components[k].dim() != n) throw DimensionError("mixture: component dimension mismatch");
    for (std::size_t x = 0; x < p.size(); ++x) p[x] += weights[k] * components[k][x];
  }
  return Dist(n, std::move(p));
}

double kl(const Dist& p, const Dist& q) {
  check_same_dim(p, q, "kl");
  double d = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) continue;
    if (q[x] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[x] * (std::log(p[x]) - std::log(q[x]));
  }
  return std::max(d, 0.0);
}

Code strong_modes(const Dist& p) {
  std::vector<StateIndex> out;
  for (std::size_t x = 0; x < p.size(); ++x) {
    double nb = 0.0;
    for (int i = 0; i < p.dim(); ++i) nb += p[x ^ (std::size_t{1} << i)];
    if (p[x] > 0.0 && p[x] >= nb) out.push_back(static_cast<StateIndex>(x));
  }
  return Code(p.dim(), std::move(out));
}

Code modes(const Dist& p) {
  std::vector<StateIndex> out;
  for (std::size_t x = 0; x < p.size(); ++x) {
    bool strict = true;
    for (int i = 0; i < p.dim() && strict; ++i) strict = p[x] > p[x ^ (std::size_t{1} << i)];
    if (strict) out.push_back(static_cast<StateIndex>(x));
  }
  return Code(p.dim(), std::move(out));
}

std::optional<int> minimum_distance(const Code& code) {
  const auto& m = code.members();
  if (m.size() < 2) return std::nullopt;
  int best = code.dim() + 1;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) best = std::min(best, hamming(m[i], m[j]));
  return best;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t counter) {
  // splitmix64 finaliser over a Weyl sequence.
  std::uint64_t z = root + 0x9E3779B97F4A7C15ull * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(derive_seed(seed, 0)); }

Dist sample_dirichlet(const DirichletParams& a, std::mt19937_64& rng) {
  std::vector<double> g(a.alpha.size());
  double sum = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    std::gamma_distribution<double> gamma(a.alpha[x], 1.0);
    g[x] = gamma(rng);
    sum += g[x];
  }
  if (!(sum > 0.0)) {
    // Every gamma draw underflowed (tiny concentrations); fall back to the largest alpha.
    const auto top = std::max_element(a.alpha.begin(), a.alpha.end()) - a.alpha.begin();
    return Dist::point(a.n, static_cast<StateIndex>(top));
  }
  for (double& v : g) v /= sum;
  return Dist(a.n, std::move(g));
}

Dist sample_dirichlet(const DirichletParams& a, std::uint64_t seed) {
  auto rng = make_rng(seed);
  return sample_dirichlet(a, rng);
}

}  // namespace zk
