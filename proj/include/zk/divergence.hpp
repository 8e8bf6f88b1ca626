#pragma once

// KL approximation errors of partition models and the resulting DBN bounds.
// All divergences are in nats.

#include <cstdint>
#include <optional>

#include "zk/distributions.hpp"
#include "zk/models.hpp"

namespace zk {

struct Projection {
  double divergence;
  Dist projection;
};

/// I-projection onto the partition model: block masses spread uniformly.
Projection kl_to_partition(const Dist& p, const Partition& rho);

/// (n - K) ln 2 for a regular partition with 2^K blocks.
double max_kl_partition(const Partition& rho);

double harmonic(long long k);

/// Expected divergence from a Dirichlet(alpha) draw to the partition model,
/// for positive integer alpha:
///   sum_j (A_j / A) ln|A_j| + sum_x (a_x / A) h(a_x) - sum_j (A_j / A) h(A_j)
/// with A_j = alpha(block j) and A = sum of alpha.
double expected_kl_partition_dirichlet(const DirichletParams& a, const Partition& rho);

struct ErrorBound {
  int n;
  int l;
  int k;
  int K;      // min(K_raw, n)
  int K_raw;  // 2^k + k + 1
  double max_nats;
  double max_bits;
  double expected_nats;
  double log2_2llog2l;  // log2(2 l log2 l), shown next to K for comparison
};

/// Bounds for a DBN with l hidden layers of width n; nullopt for l < 3.
std::optional<ErrorBound> dbn_error_bounds(int n, int l);

/// 1 + ln(2^d) - h(2^d) for d = n - K.
double expected_bound_nats(int n, int K);

struct MonteCarloEstimate {
  double mean;
  double se;
};

/// Mean and standard error of kl_to_partition over Dirichlet draws. Draw i
/// uses seed derive_seed(seed, i).
MonteCarloEstimate monte_carlo_expected_kl(const Partition& rho, const DirichletParams& a, std::uint64_t samples,
                                           std::uint64_t seed);

}  // namespace zk
