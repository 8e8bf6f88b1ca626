#pragma once

// Probability vectors on {0,1}^n and the elementary operations on them.
// Divergences are in nats throughout; to_bits() converts for reporting.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "zk/hypercube.hpp"

namespace zk {

/// Probability vector of length 2^n in state-index order.
class Dist {
 public:
  /// Entries must be non-negative and sum to 1 within 1e-9; the stored
  /// vector is renormalised so the sum is exact to rounding.
  Dist(int n, std::vector<double> probs);

  static Dist uniform(int n);
  static Dist point(int n, StateIndex x);
  /// Normalises exp(log_weights) with max subtraction. -inf entries get mass 0.
  static Dist from_log_weights(int n, std::span<const double> log_weights);
  /// Normalises a non-negative weight vector of any positive total.
  static Dist from_weights(int n, std::span<const double> weights);

  int dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t x) const { return p_[x]; }
  const std::vector<double>& probs() const noexcept { return p_; }
  Eigen::Map<const Eigen::RowVectorXd> row() const {
    return {p_.data(), static_cast<Eigen::Index>(p_.size())};
  }
  std::vector<StateIndex> support(double tol = 0.0) const;

 private:
  int n_;
  std::vector<double> p_;
};

/// Natural parameters B of the product distribution p_B(v) ∝ exp(B·v).
using NaturalParams = Eigen::VectorXd;

struct DirichletParams {
  int n;
  std::vector<double> alpha;  // length 2^n, all positive

  DirichletParams(int n, std::vector<double> alpha);
  static DirichletParams symmetric(int n, double concentration);
};

/// An n-bit code: a sorted set of distinct states.
class Code {
 public:
  Code(int n, std::vector<StateIndex> members);
  int dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return members_.size(); }
  const std::vector<StateIndex>& members() const noexcept { return members_; }
  bool contains(StateIndex x) const;
  friend bool operator==(const Code&, const Code&) = default;

 private:
  int n_;
  std::vector<StateIndex> members_;
};

/// Total variation distance, max over events |p(A) - q(A)|.
double total_variation(const Dist& p, const Dist& q);
double sup_norm(const Dist& p, const Dist& q);

Dist product_distribution(const NaturalParams& B);

/// P(v_i = 1) for every coordinate.
std::vector<double> marginals(const Dist& p);

/// Max-abs deviation of p from the product of its own marginals.
double product_defect(const Dist& p);

/// Logits of the marginals of a product distribution, clamped to ±clamp.
NaturalParams product_natural_params(const Dist& p, double clamp = 40.0);

Dist mixture(std::span<const Dist> components, std::span<const double> weights);

/// D(p || q) in nats with 0 log 0 = 0; +inf when supp(p) is not inside supp(q).
double kl(const Dist& p, const Dist& q);

inline double to_bits(double nats) { return nats / 0.69314718055994530942; }

/// States x with p(x) >= sum of p over the Hamming neighbours of x.
Code strong_modes(const Dist& p);

/// Strict local maxima of p over the cube graph.
Code modes(const Dist& p);

/// Minimum pairwise Hamming distance; nullopt for codes with fewer than two words.
std::optional<int> minimum_distance(const Code& code);

/// Engine seeded through splitmix64 so neighbouring seeds decorrelate.
std::mt19937_64 make_rng(std::uint64_t seed);

/// Counter-based child seed; sample i of a run with root seed s uses derive_seed(s, i).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t counter);

Dist sample_dirichlet(const DirichletParams& a, std::uint64_t seed);
Dist sample_dirichlet(const DirichletParams& a, std::mt19937_64& rng);

}  // namespace zk
