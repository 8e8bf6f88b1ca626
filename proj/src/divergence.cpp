#include "zk/divergence.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "zk/errors.hpp"
#include "zk/sharing.hpp"

namespace zk {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Pairwise summation keeps the Monte Carlo mean independent of accumulation drift.
double pairwise_sum(const double* x, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += x[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, count - half);
}

long long as_positive_integer(double a) {
  const double r = std::round(a);
  if (std::abs(a - r) > 1e-12 || r < 1.0) {
    throw std::invalid_argument("expected_kl_partition_dirichlet: concentrations must be positive integers");
  }
  return static_cast<long long>(r);
}

}  // namespace

Projection kl_to_partition(const Dist& p, const Partition& rho) {
  if (p.dim() != rho.dim()) throw DimensionError("kl_to_partition: dimension mismatch");
  std::vector<double> q(p.size(), 0.0);
  double d = 0.0;
  for (const auto& block : rho.blocks()) {
    double mass = 0.0;
    for (StateIndex x : block) mass += p[x];
    const double each = mass / static_cast<double>(block.size());
    for (StateIndex x : block) {
      q[x] = each;
      if (p[x] > 0.0) d += p[x] * (std::log(p[x]) - std::log(each));
    }
  }
  return {std::max(d, 0.0), Dist(p.dim(), std::move(q))};
}

double max_kl_partition(const Partition& rho) {
  if (!rho.is_regular()) throw std::invalid_argument("max_kl_partition: partition is not regular");
  return (rho.dim() - rho.log2_blocks()) * kLn2;
}

double harmonic(long long k) {
  if (k < 0) throw std::invalid_argument("harmonic: k must be non-negative");
  // Summing smallest terms first.
  double s = 0.0;
  for (long long i = k; i >= 1; --i) s += 1.0 / static_cast<double>(i);
  return s;
}

double expected_kl_partition_dirichlet(const DirichletParams& a, const Partition& rho) {
  if (a.n != rho.dim()) throw DimensionError("expected_kl_partition_dirichlet: dimension mismatch");
  std::vector<long long> alpha(a.alpha.size());
  long long total = 0;
  for (std::size_t x = 0; x < alpha.size(); ++x) {
    alpha[x] = as_positive_integer(a.alpha[x]);
    total += alpha[x];
  }
  const double A = static_cast<double>(total);
  double value = 0.0;
  for (std::size_t x = 0; x < alpha.size(); ++x) value += alpha[x] / A * harmonic(alpha[x]);
  for (const auto& block : rho.blocks()) {
    long long Aj = 0;
    for (StateIndex x : block) Aj += alpha[x];
    value += Aj / A * (std::log(static_cast<double>(block.size())) - harmonic(Aj));
  }
  return value;
}

double expected_bound_nats(int n, int K) {
  const int d = n - K;
  if (d <= 0) return 0.0;
  return 1.0 + d * kLn2 - harmonic(1LL << d);
}

std::optional<ErrorBound> dbn_error_bounds(int n, int l) {
  if (n < 1) throw std::invalid_argument("dbn_error_bounds: n must be positive");
  const auto dk = depth_to_K(l);
  if (!dk) return std::nullopt;
  ErrorBound b{};
  b.n = n;
  b.l = l;
  b.k = dk->k;
  b.K_raw = dk->K;
  b.K = std::min(dk->K, n);
  b.max_bits = n - b.K;
  b.max_nats = b.max_bits * kLn2;
  b.expected_nats = expected_bound_nats(n, b.K);
  b.log2_2llog2l = std::log2(2.0 * l * std::log2(static_cast<double>(l)));
  return b;
}

MonteCarloEstimate monte_carlo_expected_kl(const Partition& rho, const DirichletParams& a, std::uint64_t samples,
                                           std::uint64_t seed) {
  if (a.n != rho.dim()) throw DimensionError("monte_carlo_expected_kl: dimension mismatch");
  if (samples < 1000) throw std::invalid_argument("monte_carlo_expected_kl: need at least 1000 samples");
  std::vector<double> values(samples);
  for (std::uint64_t i = 0; i < samples; ++i) {
    values[i] = kl_to_partition(sample_dirichlet(a, derive_seed(seed, i)), rho).divergence;
  }
  const double mean = pairwise_sum(values.data(), values.size()) / static_cast<double>(samples);
  std::vector<double> sq(samples);
  for (std::uint64_t i = 0; i < samples; ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  const double var = pairwise_sum(sq.data(), sq.size()) / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace zk
