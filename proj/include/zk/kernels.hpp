#pragma once

// Zonoset kernels K_{W,B}: row h is the product distribution with natural
// parameters hW + B. Rows and columns follow the state-index order of
// hypercube.hpp.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "zk/distributions.hpp"
#include "zk/hypercube.hpp"

namespace zk {

struct ZonosetParams {
  Eigen::MatrixXd W;  // m x n
  Eigen::VectorXd B;  // n

  ZonosetParams() = default;
  ZonosetParams(Eigen::MatrixXd W, Eigen::VectorXd B);
  int m() const noexcept { return static_cast<int>(W.rows()); }
  int n() const noexcept { return static_cast<int>(B.size()); }

  static ZonosetParams zeros(int m, int n);
  /// Standard normal entries drawn from rng (W row-major first, then B), times scale.
  static ZonosetParams random(int m, int n, std::mt19937_64& rng, double scale = 1.0);
};

/// Points hW + B, one row per h in index order (2^m x n).
Eigen::MatrixXd zonoset(const ZonosetParams& params);

class Kernel {
 public:
  /// Every row must be a probability vector within 1e-9; rows are renormalised.
  Kernel(int m, int n, Eigen::MatrixXd rows);

  int m() const noexcept { return m_; }
  int n() const noexcept { return n_; }
  const Eigen::MatrixXd& matrix() const noexcept { return k_; }
  double operator()(StateIndex h, StateIndex v) const { return k_(h, v); }
  Dist row(StateIndex h) const;

 private:
  int m_;
  int n_;
  Eigen::MatrixXd k_;
};

Kernel zonoset_kernel(const ZonosetParams& params);

/// q * K.
Dist apply(const Dist& q, const Kernel& K);

/// K1 * K2, a kernel from K1's input space to K2's output space.
Kernel compose(const Kernel& K1, const Kernel& K2);

/// K(h, v) = p(h xor v).
Kernel shift_kernel(const Dist& p);

/// Parameters whose kernel tends, as alpha grows, to K(h, v) = p(h_I xor v),
/// where p is the product distribution on `face` with natural parameters
/// `extra_bias` on the free coordinates. Entries of extra_bias on fixed
/// coordinates are ignored. Each fixed coordinate has logit margin alpha/2.
ZonosetParams face_uniform_params(const CubeFace& face, const NaturalParams& extra_bias, double alpha);

/// Sup-norm error bound of face_uniform_params at finite alpha.
double face_uniform_error_bound(const CubeFace& face, double alpha);

/// The limit kernel of face_uniform_params, built directly from the shift construction.
Kernel face_shift_kernel(const CubeFace& face, const NaturalParams& extra_bias);

/// Numerical rank: singular values above rel_tol * sigma_max * max(rows, cols).
int kernel_rank(const Kernel& K, double rel_tol = 1e-9);

struct MinorReport {
  bool all_nonzero = true;
  double min_rel = 0.0;  // smallest |minor| / (product of its row norms) over every order
  // Smallest |minor| of each order k = 1..min(rows, cols); index k-1.
  std::vector<double> min_abs_by_order;
};

/// Exhaustive check of every square minor, with determinants in long double.
/// A minor counts as zero when |minor| <= rel_tol times its Hadamard bound
/// (the product of its row norms). Rows and columns are capped at 16.
MinorReport all_minors_nonzero(const Kernel& K, double rel_tol = 1e-16);

/// Multilinearity of log K~(h, v) = (hW + B) v over disjoint-support pairs h, h'.
bool monomial_factorization_check(const ZonosetParams& params, double tol = 1e-9);

/// Same identity on a kernel, where row normalisers make the residual constant in v.
bool monomial_factorization_check(const Kernel& K, double tol = 1e-9);

/// Max over rows of product_defect; zero iff every row is a product distribution.
double max_row_product_defect(const Kernel& K);

enum class LtcDecision { yes, no, unknown };

struct LtcOptions {
  bool strict = false;  // sign vectors must be exactly C, not a superset
  std::uint64_t budget = 1'000'000;  // search nodes before giving up
};

struct LtcResult {
  LtcDecision decision = LtcDecision::unknown;
  std::optional<ZonosetParams> witness;  // sign(hW + B) realises the code, no zero entries
  std::uint64_t nodes = 0;
};

/// Decides whether the sign vectors of some (m, C.n)-zonoset contain C (or
/// equal C when strict). Each column of a zonoset is a linear threshold
/// function of h, so the search picks one threshold function per column.
/// Requires m <= 4.
LtcResult is_linear_threshold_code(const Code& code, int m, LtcOptions options = {});

/// Sign pattern of every zonoset point as a state index (coordinate j set iff
/// point_j > 0). Throws if a coordinate is exactly zero.
std::vector<StateIndex> zonoset_signs(const ZonosetParams& params);

/// All linear threshold functions on {0,1}^m (m <= 4) as truth tables, bit h = f(h).
const std::vector<std::uint32_t>& threshold_functions(int m);

}  // namespace zk
