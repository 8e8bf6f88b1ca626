#pragma once

// Probability sharing along hypercube paths: one DBN layer per path step.

#include <optional>
#include <vector>

#include "zk/distributions.hpp"
#include "zk/hypercube.hpp"
#include "zk/models.hpp"

namespace zk {

/// Checks that every step of the family can be carried out by one edge
/// sharing layer: moving paths leave from distinct states, no path moves into
/// a state another path is leaving, and same-bit movers sit on a common edge.
FamilyCheck sharing_compatible(const PathFamily& family);

/// Distributions before every step, computed backward from `target`:
/// result[t] is the mass at time t, result.back() == target.
std::vector<Dist> backward_masses(const PathFamily& family, const Dist& target);

/// DBN with widths (n, ..., n) and as many hidden layers as the family has
/// states per path. The top RBM holds the time-0 masses; layer t of the
/// downward pass performs path step t. supp(target) must lie in the visited
/// states, and the time-0 masses must fit in n+1 edges.
DbnParams layers_from_path_family(const PathFamily& family, const Dist& target, double omega = kDefaultOmega);

/// Paths covering N faces with pairwise disjoint free coordinates, each of
/// dimension 2^k + k + 1. Paths have 2^(2^k) states, padded with stay-put
/// steps up to `length` when given.
PathFamily face_cover_family(const std::vector<CubeFace>& faces, std::optional<int> length = std::nullopt);

/// Face dimension 2^k + k + 1 for k >= 0, or nullopt when d is not of that form.
std::optional<int> face_cover_order(int dimension);

struct DepthK {
  int k;
  int K;
};

/// Largest k with l - 1 >= 2^(2^k) and K = 2^k + k + 1; nullopt for l < 3.
std::optional<DepthK> depth_to_K(int l);

/// ceil(2^n / (2 (n - log2 n))).
long long min_layers_universal(int n);
/// The other grouping, (2^n / 2) (n - log2 n), reported for comparison.
double min_layers_universal_alt(int n);

/// DBN of width n with l hidden layers whose output is the partition model
/// member with the given block weights on the cylinder partition over
/// `lambda`. Lambda lists the hidden coordinates that carry the block index.
DbnParams realize_partition_model(int n, int l, const std::vector<int>& lambda, const std::vector<int>& Lambda,
                                  const std::vector<double>& block_weights, double omega = kDefaultOmega);

}  // namespace zk
