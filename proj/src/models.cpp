#include "zk/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

#include "zk/errors.hpp"

namespace zk {

namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double log_sum_exp(const std::vector<double>& xs) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : xs) top = std::max(top, x);
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - top);
  return top + std::log(s);
}

double dot_state(const Eigen::VectorXd& b, std::size_t x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if ((x >> i) & 1u) s += b[i];
  return s;
}

// u[j] = sum_i W(j, i) x_i for a state x of the column space.
Eigen::VectorXd row_action(const Eigen::MatrixXd& W, std::size_t x) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(W.rows());
  for (Eigen::Index i = 0; i < W.cols(); ++i)
    if ((x >> i) & 1u) u += W.col(i);
  return u;
}

double logit_clamped(double p, double limit) {
  if (p <= 0.0) return -limit;
  if (p >= 1.0) return limit;
  return std::clamp(std::log(p) - std::log1p(-p), -limit, limit);
}

void check_coords(const std::vector<int>& coords, int n, const char* what) {
  std::set<int> seen;
  for (int c : coords) {
    if (c < 0 || c >= n) throw std::out_of_range(std::string(what) + ": coordinate out of range");
    if (!seen.insert(c).second) throw std::invalid_argument(std::string(what) + ": repeated coordinate");
  }
}

}  // namespace

RbmParams::RbmParams(Eigen::MatrixXd W_, Eigen::VectorXd B_, Eigen::VectorXd C_)
    : W(std::move(W_)), B(std::move(B_)), C(std::move(C_)) {
  if (W.rows() != C.size() || W.cols() != B.size()) throw DimensionError("RbmParams: W must be m x n");
  if (!W.allFinite() || !B.allFinite() || !C.allFinite()) throw std::invalid_argument("RbmParams: non-finite entry");
}

DbnParams::DbnParams(std::vector<int> widths_, std::vector<Eigen::MatrixXd> weights_,
                     std::vector<Eigen::VectorXd> biases_)
    : widths(std::move(widths_)), weights(std::move(weights_)), biases(std::move(biases_)) {
  if (widths.size() < 2) throw std::invalid_argument("DbnParams: need at least one hidden layer");
  const std::size_t l = widths.size() - 1;
  if (weights.size() != l) throw DimensionError("DbnParams: expected " + std::to_string(l) + " weight matrices");
  if (biases.size() != l + 1) throw DimensionError("DbnParams: expected " + std::to_string(l + 1) + " bias vectors");
  for (int w : widths)
    if (w < 0) throw std::invalid_argument("DbnParams: negative width");
  for (std::size_t k = 1; k <= l; ++k) {
    const auto& Wk = weights[k - 1];
    if (Wk.rows() != widths[k] || Wk.cols() != widths[k - 1]) {
      throw DimensionError("DbnParams: W^" + std::to_string(k) + " must be " + std::to_string(widths[k]) + "x" +
                           std::to_string(widths[k - 1]));
    }
    if (!Wk.allFinite()) throw std::invalid_argument("DbnParams: non-finite weight");
  }
  for (std::size_t k = 0; k <= l; ++k) {
    if (biases[k].size() != widths[k]) throw DimensionError("DbnParams: B^" + std::to_string(k) + " size");
    if (!biases[k].allFinite()) throw std::invalid_argument("DbnParams: non-finite bias");
  }
}

int DbnParams::total_units() const { return std::accumulate(widths.begin(), widths.end(), 0); }

DbnParams DbnParams::zeros(std::vector<int> widths) {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> B;
  for (std::size_t k = 0; k < widths.size(); ++k) {
    B.push_back(Eigen::VectorXd::Zero(widths[k]));
    if (k > 0) W.push_back(Eigen::MatrixXd::Zero(widths[k], widths[k - 1]));
  }
  return DbnParams(std::move(widths), std::move(W), std::move(B));
}

DbnParams DbnParams::random(std::vector<int> widths, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  DbnParams p = zeros(std::move(widths));
  for (auto& W : p.weights)
    for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = normal(rng);
  for (auto& B : p.biases)
    for (Eigen::Index i = 0; i < B.size(); ++i) B[i] = normal(rng);
  return p;
}

RbmParams top_rbm(const DbnParams& params) {
  const int l = params.depth();
  return RbmParams(params.weights[l - 1], params.biases[l - 1], params.biases[l]);
}

ZonosetParams layer_params(const DbnParams& params, int k) {
  if (k < 1 || k > params.depth()) throw std::out_of_range("layer_params: layer index out of range");
  return ZonosetParams(params.weights[k - 1], params.biases[k - 1]);
}

Dist rbm_dist(const RbmParams& params) {
  const int n = params.n();
  require_units(n + params.m(), "rbm_dist");
  const std::size_t count = state_count(n);
  std::vector<double> lw(count);
  for (std::size_t v = 0; v < count; ++v) {
    const Eigen::VectorXd act = params.C + row_action(params.W, v);
    double s = dot_state(params.B, v);
    for (Eigen::Index j = 0; j < act.size(); ++j) s += softplus(act[j]);
    lw[v] = s;
  }
  return Dist::from_log_weights(n, lw);
}

Dist directed_rbm_dist(const ZonosetParams& params, const NaturalParams& C) {
  if (C.size() != params.m()) throw DimensionError("directed_rbm_dist: C must have one entry per hidden unit");
  return apply(product_distribution(C), zonoset_kernel(params));
}

Dist dbn_dist(const DbnParams& params) {
  require_units(params.total_units(), "dbn_dist");
  Dist q = rbm_dist(top_rbm(params));
  for (int k = params.depth() - 1; k >= 1; --k) q = apply(q, zonoset_kernel(layer_params(params, k)));
  return q;
}

Dist dbm_dist(const DbnParams& params) {
  require_units(params.total_units(), "dbm_dist");
  const int l = params.depth();
  // Log-message from layer k into layer k-1, starting with the closed form for the top layer.
  const int below = params.widths[l - 1];
  std::vector<double> msg(state_count(below));
  for (std::size_t x = 0; x < msg.size(); ++x) {
    const Eigen::VectorXd act = params.biases[l] + row_action(params.weights[l - 1], x);
    double s = 0.0;
    for (Eigen::Index j = 0; j < act.size(); ++j) s += softplus(act[j]);
    msg[x] = s;
  }
  for (int k = l - 1; k >= 1; --k) {
    const std::size_t upper = state_count(params.widths[k]);
    const std::size_t lower = state_count(params.widths[k - 1]);
    std::vector<double> next(lower), terms(upper);
    for (std::size_t x = 0; x < lower; ++x) {
      const Eigen::VectorXd act = params.biases[k] + row_action(params.weights[k - 1], x);
      for (std::size_t h = 0; h < upper; ++h) terms[h] = dot_state(act, h) + msg[h];
      next[x] = log_sum_exp(terms);
    }
    msg = std::move(next);
  }
  for (std::size_t v = 0; v < msg.size(); ++v) msg[v] += dot_state(params.biases[0], v);
  return Dist::from_log_weights(params.widths[0], msg);
}

Dist zmp_dist(const ZonosetParams& params, const Dist& lambda) { return apply(lambda, zonoset_kernel(params)); }

Partition::Partition(int n, std::vector<std::vector<StateIndex>> blocks) : n_(n), blocks_(std::move(blocks)) {
  const std::size_t count = state_count(n);
  owner_.assign(count, -1);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (blocks_[b].empty()) throw std::invalid_argument("Partition: empty block");
    std::sort(blocks_[b].begin(), blocks_[b].end());
    for (StateIndex x : blocks_[b]) {
      if (x >= count) throw std::out_of_range("Partition: state out of range");
      if (owner_[x] != -1) throw std::invalid_argument("Partition: blocks overlap");
      owner_[x] = static_cast<int>(b);
    }
  }
  if (std::find(owner_.begin(), owner_.end(), -1) != owner_.end()) {
    throw std::invalid_argument("Partition: blocks do not cover the state space");
  }
}

Partition Partition::cylinder(int n, const std::vector<int>& lambda) {
  check_coords(lambda, n, "Partition::cylinder");
  std::vector<std::vector<StateIndex>> blocks(std::size_t{1} << lambda.size());
  const std::size_t count = state_count(n);
  for (std::size_t x = 0; x < count; ++x) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < lambda.size(); ++j)
      if ((x >> lambda[j]) & 1u) c |= std::size_t{1} << j;
    blocks[c].push_back(static_cast<StateIndex>(x));
  }
  return Partition(n, std::move(blocks));
}

Partition Partition::singletons(int n) {
  std::vector<std::vector<StateIndex>> blocks;
  for (std::size_t x = 0; x < state_count(n); ++x) blocks.push_back({static_cast<StateIndex>(x)});
  return Partition(n, std::move(blocks));
}

Partition Partition::whole(int n) {
  std::vector<StateIndex> all(state_count(n));
  std::iota(all.begin(), all.end(), StateIndex{0});
  return Partition(n, {all});
}

bool Partition::is_regular() const {
  const std::size_t b = blocks_.size();
  if ((b & (b - 1)) != 0) return false;
  const std::size_t size = owner_.size() / b;
  return std::all_of(blocks_.begin(), blocks_.end(), [size](const auto& blk) { return blk.size() == size; });
}

int Partition::log2_blocks() const {
  if (!is_regular()) throw std::invalid_argument("Partition: irregular partition has no K");
  return __builtin_ctzll(blocks_.size());
}

Dist partition_model_member(const Partition& rho, const std::vector<double>& block_weights) {
  if (block_weights.size() != rho.block_count()) {
    throw DimensionError("partition_model_member: " + std::to_string(block_weights.size()) + " weights for " +
                         std::to_string(rho.block_count()) + " blocks");
  }
  std::vector<double> p(state_count(rho.dim()), 0.0);
  for (std::size_t b = 0; b < block_weights.size(); ++b) {
    if (!(block_weights[b] >= 0.0)) throw std::invalid_argument("partition_model_member: negative weight");
    const double each = block_weights[b] / static_cast<double>(rho.blocks()[b].size());
    for (StateIndex x : rho.blocks()[b]) p[x] = each;
  }
  return Dist(rho.dim(), std::move(p));
}

ZonosetParams construct_affine_rows(const std::vector<Dist>& targets, const std::vector<StateIndex>& anchors, int m) {
  if (targets.size() != static_cast<std::size_t>(m) + 1 || anchors.size() != targets.size()) {
    throw DimensionError("construct_affine_rows: need m+1 targets and m+1 anchors");
  }
  const int n = targets.front().dim();
  const StateIndex limit = static_cast<StateIndex>(state_count(m));
  std::vector<Eigen::VectorXd> theta;
  for (const auto& t : targets) {
    if (t.dim() != n) throw DimensionError("construct_affine_rows: targets differ in dimension");
    if (product_defect(t) > 1e-9) throw std::invalid_argument("construct_affine_rows: target is not a product");
    theta.push_back(product_natural_params(t));
  }
  for (StateIndex a : anchors)
    if (a >= limit) throw std::out_of_range("construct_affine_rows: anchor out of range");

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, n);
  if (m > 0) {
    Eigen::MatrixXd D(m, m), T(m, n);
    for (int k = 1; k <= m; ++k) {
      for (int i = 0; i < m; ++i) {
        D(k - 1, i) = static_cast<double>((anchors[k] >> i) & 1u) - static_cast<double>((anchors[0] >> i) & 1u);
      }
      T.row(k - 1) = (theta[k] - theta[0]).transpose();
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(D);
    if (lu.rank() < m) throw std::invalid_argument("construct_affine_rows: anchors are affinely dependent");
    W = lu.solve(T);
  }
  Eigen::VectorXd B = theta[0];
  for (int i = 0; i < m; ++i)
    if ((anchors[0] >> i) & 1u) B -= W.row(i).transpose();
  return ZonosetParams(std::move(W), std::move(B));
}

ZonosetParams construct_partition_rows(int m, int n, const std::vector<int>& lambda, const std::vector<int>& Lambda,
                                       double alpha) {
  if (lambda.size() != Lambda.size()) throw DimensionError("construct_partition_rows: |lambda| != |Lambda|");
  check_coords(lambda, n, "construct_partition_rows");
  check_coords(Lambda, m, "construct_partition_rows");
  ZonosetParams p = ZonosetParams::zeros(m, n);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    p.W(Lambda[i], lambda[i]) = alpha;
    p.B[lambda[i]] = -alpha / 2.0;
  }
  return p;
}

ZonosetParams construct_face_intersection_rows(const std::vector<CubeFace>& faces, double alpha) {
  if (faces.empty()) throw std::invalid_argument("construct_face_intersection_rows: no faces");
  const int n = faces.front().ambient_dim();
  const int m = static_cast<int>(faces.size());
  ZonosetParams p = ZonosetParams::zeros(m, n);
  for (int i = 0; i < m; ++i) {
    if (faces[i].ambient_dim() != n) throw DimensionError("construct_face_intersection_rows: mixed dimensions");
    for (int j : faces[i].fixed_coords()) {
      p.W(i, j) = ((faces[i].fixed_values() >> j) & 1u) ? alpha : -alpha;
    }
  }
  return p;
}

namespace {

void validate_spec(const EdgeSharingSpec& spec, int n) {
  require_units(n, "construct_edge_sharing_layer");
  if (!(spec.omega > 0.0)) throw std::invalid_argument("edge sharing: omega must be positive");
  const StateIndex limit = static_cast<StateIndex>(state_count(n));
  std::set<int> units;
  std::set<StateIndex> rows;
  for (const auto& e : spec.entries) {
    if (e.unit < 0 || e.unit >= n) throw std::out_of_range("edge sharing: unit out of range");
    if (!units.insert(e.unit).second) throw std::invalid_argument("edge sharing: unit used by two entries");
    if (e.anchor >= limit) throw std::out_of_range("edge sharing: anchor out of range");
    if (!(e.p_anchor >= 0.0 && e.p_anchor <= 1.0 && e.p_partner >= 0.0 && e.p_partner <= 1.0)) {
      throw std::invalid_argument("edge sharing: probabilities must lie in [0, 1]");
    }
    if (!rows.insert(e.anchor).second) throw std::invalid_argument("edge sharing: overlapping edges");
    if (e.edge_bit) {
      const int r = *e.edge_bit;
      if (r < 0 || r >= n) throw std::out_of_range("edge sharing: edge bit out of range");
      if (r == e.unit) throw std::invalid_argument("edge sharing: edge bit must differ from the controlled unit");
      if (!rows.insert(e.anchor ^ (StateIndex{1} << r)).second) {
        throw std::invalid_argument("edge sharing: overlapping edges");
      }
    }
  }
}

}  // namespace

ZonosetParams construct_edge_sharing_layer(const EdgeSharingSpec& spec, int n) {
  validate_spec(spec, n);
  const double w = spec.omega;
  ZonosetParams p = ZonosetParams::zeros(n, n);
  std::vector<bool> has_entry(n, false);
  for (const auto& e : spec.entries) has_entry[e.unit] = true;
  for (int s = 0; s < n; ++s) {
    if (has_entry[s]) continue;
    p.W(s, s) = 2.0 * w;
    p.B[s] = -w;
  }

  for (const auto& e : spec.entries) {
    const int s = e.unit;
    const StateIndex x = e.anchor;
    const int xs = (x >> s) & 1u;
    const double sign_s = 1.0 - 2.0 * xs;
    // theta_s = w * bracket(h) + finite(h). bracket vanishes exactly on the
    // entry's rows and has magnitude >= 1 with sign (2 h_s - 1) elsewhere.
    p.W(s, s) += w * n;
    double constant = -w * n * xs;
    int ones = 0;
    for (int i = 0; i < n; ++i) {
      if (i == s || (e.edge_bit && i == *e.edge_bit)) continue;
      const int xi = (x >> i) & 1u;
      p.W(i, s) += w * sign_s * (2.0 * xi - 1.0);
      ones += xi;
    }
    constant -= w * sign_s * ones;

    const double eta_x = logit_clamped(e.p_anchor, w / 2.0);
    if (e.edge_bit) {
      const int r = *e.edge_bit;
      const double eta_y = logit_clamped(e.p_partner, w / 2.0);
      if ((x >> r) & 1u) {
        constant += eta_y;
        p.W(r, s) += eta_x - eta_y;
      } else {
        constant += eta_x;
        p.W(r, s) += eta_y - eta_x;
      }
    } else {
      constant += eta_x;
    }
    p.B[s] += constant;
  }
  return p;
}

Kernel edge_sharing_limit(const EdgeSharingSpec& spec, int n) {
  validate_spec(spec, n);
  const auto count = static_cast<Eigen::Index>(state_count(n));
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(count, count);
  for (Eigen::Index h = 0; h < count; ++h) K(h, h) = 1.0;
  for (const auto& e : spec.entries) {
    auto place = [&](StateIndex h, double p_on) {
      const StateIndex bit = StateIndex{1} << e.unit;
      K.row(h).setZero();
      K(h, h | bit) += p_on;
      K(h, h & ~bit) += 1.0 - p_on;
    };
    place(e.anchor, e.p_anchor);
    if (e.edge_bit) place(e.anchor ^ (StateIndex{1} << *e.edge_bit), e.p_partner);
  }
  return Kernel(n, n, std::move(K));
}

RbmParams rbm_for_sparse_support(const Dist& target, int m, double omega) {
  const int n = target.dim();
  if (!(omega > 0.0)) throw std::invalid_argument("rbm_for_sparse_support: omega must be positive");
  const auto support = target.support(0.0);
  const auto comps = min_edge_cover(n, support);
  if (comps.size() > static_cast<std::size_t>(m) + 1) {
    throw std::invalid_argument("rbm_for_sparse_support: support needs " + std::to_string(comps.size()) +
                                " edges but only " + std::to_string(m + 1) + " are available");
  }
  auto partner = [](const SupportComponent& c) { return c.anchor ^ (StateIndex{1} << *c.edge_bit); };
  auto mass = [&](const SupportComponent& c) { return target[c.anchor] + (c.edge_bit ? target[partner(c)] : 0.0); };
  const std::size_t base_idx = static_cast<std::size_t>(
      std::max_element(comps.begin(), comps.end(), [&](const auto& a, const auto& b) { return mass(a) < mass(b); }) -
      comps.begin());
  const SupportComponent& base = comps[base_idx];

  Eigen::VectorXd B(n);
  int base_ones = 0;
  for (int i = 0; i < n; ++i) {
    const int ai = (base.anchor >> i) & 1u;
    B[i] = omega * (2.0 * ai - 1.0);
    if (!(base.edge_bit && i == *base.edge_bit)) base_ones += ai;
  }
  const double log_base_anchor = std::log(target[base.anchor]);
  if (base.edge_bit) B[*base.edge_bit] = std::log(target[partner(base)]) - log_base_anchor;
  const double L0 = omega * base_ones;
  // Unnormalised model weight must be exp(L0) * t(v) / t(base anchor) on the support.
  auto log_goal = [&](StateIndex v) { return L0 + std::log(target[v]) - log_base_anchor; };
  auto log_base = [&](StateIndex v) { return dot_state(B, v); };
  auto activation = [&](StateIndex v) {
    const double L = log_goal(v) - log_base(v);
    if (L <= 1e-300) return -omega;
    return std::max(L + std::log1p(-std::exp(-L)), -omega);
  };

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd C = Eigen::VectorXd::Zero(m);
  int j = 0;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    if (c == base_idx) continue;
    const auto& comp = comps[c];
    const double z_lo = activation(comp.anchor);
    const double eta = comp.edge_bit ? activation(partner(comp)) - z_lo : 0.0;
    const double sigma = std::max({z_lo, z_lo + eta, 0.0}) + omega;
    int ones = 0;
    for (int i = 0; i < n; ++i) {
      if (comp.edge_bit && i == *comp.edge_bit) {
        W(j, i) = eta;
        continue;
      }
      const int ai = (comp.anchor >> i) & 1u;
      W(j, i) = sigma * (2.0 * ai - 1.0);
      ones += ai;
    }
    C[j] = -sigma * ones + z_lo;
    ++j;
  }
  return RbmParams(std::move(W), std::move(B), std::move(C));
}

DbnParams construct_mixture_dbn(const std::vector<Dist>& targets, const std::vector<double>& weights, double omega) {
  if (targets.empty()) throw std::invalid_argument("construct_mixture_dbn: no targets");
  if (weights.size() != targets.size()) throw DimensionError("construct_mixture_dbn: weight count mismatch");
  const int m = static_cast<int>(targets.size()) - 1;
  const int n = targets.front().dim();
  std::vector<StateIndex> anchors{0};
  for (int i = 0; i < m; ++i) anchors.push_back(StateIndex{1} << i);
  const ZonosetParams bottom = construct_affine_rows(targets, anchors, m);

  std::vector<double> mu(state_count(m), 0.0);
  for (std::size_t k = 0; k < anchors.size(); ++k) mu[anchors[k]] = weights[k];
  const RbmParams top = rbm_for_sparse_support(Dist(m, std::move(mu)), m, omega);

  return DbnParams({n, m, m}, {bottom.W, top.W}, {bottom.B, top.B, top.C});
}

}  // namespace zk
