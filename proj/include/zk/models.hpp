#pragma once

// Visible marginals of RBMs, DBNs, DBMs and zonoset mixtures by exact
// enumeration, plus explicit parameter constructions for rows of zonoset
// kernels.

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "zk/distributions.hpp"
#include "zk/hypercube.hpp"
#include "zk/kernels.hpp"

namespace zk {

/// Default sharpness of the limit constructions.
inline constexpr double kDefaultOmega = 30.0;

struct RbmParams {
  Eigen::MatrixXd W;  // m x n, hidden by visible
  Eigen::VectorXd B;  // visible bias, n
  Eigen::VectorXd C;  // hidden bias, m

  RbmParams() = default;
  RbmParams(Eigen::MatrixXd W, Eigen::VectorXd B, Eigen::VectorXd C);
  int n() const noexcept { return static_cast<int>(B.size()); }
  int m() const noexcept { return static_cast<int>(C.size()); }
};

/// Layer stack with widths n_0 (visible) .. n_l. weights[k-1] is W^k of shape
/// n_k x n_{k-1}; biases[k] is B^k of length n_k.
struct DbnParams {
  std::vector<int> widths;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  DbnParams() = default;
  DbnParams(std::vector<int> widths, std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases);
  int depth() const noexcept { return static_cast<int>(widths.size()) - 1; }
  int total_units() const;

  static DbnParams zeros(std::vector<int> widths);
  static DbnParams random(std::vector<int> widths, std::mt19937_64& rng, double scale = 1.0);
};

/// Top RBM of a DBN: visible layer l-1, hidden layer l.
RbmParams top_rbm(const DbnParams& params);

/// Downward kernel from layer k to layer k-1 (1 <= k < l).
ZonosetParams layer_params(const DbnParams& params, int k);

Dist rbm_dist(const RbmParams& params);
Dist directed_rbm_dist(const ZonosetParams& params, const NaturalParams& C);
Dist dbn_dist(const DbnParams& params);
/// Bottom marginal of the undirected Boltzmann machine with the same layer stack.
Dist dbm_dist(const DbnParams& params);
Dist zmp_dist(const ZonosetParams& params, const Dist& lambda);

class Partition {
 public:
  Partition(int n, std::vector<std::vector<StateIndex>> blocks);

  /// Blocks {x : x_lambda = c}; block index c has bit j equal to x_{lambda[j]}.
  static Partition cylinder(int n, const std::vector<int>& lambda);
  static Partition singletons(int n);
  static Partition whole(int n);

  int dim() const noexcept { return n_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  const std::vector<std::vector<StateIndex>>& blocks() const noexcept { return blocks_; }
  int block_of(StateIndex x) const { return owner_.at(x); }
  /// 2^K blocks, each of size 2^(n-K).
  bool is_regular() const;
  /// K of a regular partition.
  int log2_blocks() const;

 private:
  int n_;
  std::vector<std::vector<StateIndex>> blocks_;
  std::vector<int> owner_;
};

Dist partition_model_member(const Partition& rho, const std::vector<double>& block_weights);

/// Kernel rows at `anchors` (m+1 affinely independent states of {0,1}^m)
/// equal the product targets. Targets are read through their marginals with
/// natural parameters clamped to +-40.
ZonosetParams construct_affine_rows(const std::vector<Dist>& targets, const std::vector<StateIndex>& anchors, int m);

/// W(Lambda_i, lambda_i) = alpha and B_{lambda_i} = -alpha/2: rows h become
/// uniform on {x : x_lambda = h_Lambda}.
ZonosetParams construct_partition_rows(int m, int n, const std::vector<int>& lambda, const std::vector<int>& Lambda,
                                       double alpha);

/// Hidden unit i votes for face i. Rows indexed by support sets S tend to the
/// uniform distribution on argmax of the summed votes, which is the
/// intersection of the faces in S when that intersection is nonempty.
ZonosetParams construct_face_intersection_rows(const std::vector<CubeFace>& faces, double alpha);

/// One entry moves mass out of `anchor` (and `anchor ^ e_r` when edge_bit is
/// set) by resampling output unit s. p_anchor and p_partner are the
/// probabilities of v_s = 1 at the two rows.
struct EdgeShare {
  StateIndex anchor = 0;
  std::optional<int> edge_bit;
  int unit = 0;
  double p_anchor = 0.5;
  double p_partner = 0.5;
};

struct EdgeSharingSpec {
  std::vector<EdgeShare> entries;
  double omega = kDefaultOmega;
};

/// (n, n) parameters: rows outside the entries tend to point measures on
/// themselves; rows at entries keep every coordinate except `unit`.
ZonosetParams construct_edge_sharing_layer(const EdgeSharingSpec& spec, int n);

/// Row targets of construct_edge_sharing_layer in the limit.
Kernel edge_sharing_limit(const EdgeSharingSpec& spec, int n);

/// RBM with m hidden units whose marginal approximates `target`, whose support
/// must be covered by at most m+1 disjoint edges and points.
RbmParams rbm_for_sparse_support(const Dist& target, int m, double omega = kDefaultOmega);

/// DBN(n, m, m) approximating the mixture of m+1 product targets.
DbnParams construct_mixture_dbn(const std::vector<Dist>& targets, const std::vector<double>& weights,
                                double omega = kDefaultOmega);

}  // namespace zk
