#include "zk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "zk/errors.hpp"

namespace zk {

namespace {

constexpr double kRowTolerance = 1e-9;

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

void fill_product_row(const Eigen::VectorXd& theta, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) {
  const int n = static_cast<int>(theta.size());
  std::vector<double> on(n), off(n);
  for (int i = 0; i < n; ++i) {
    on[i] = -softplus(-theta[i]);
    off[i] = -softplus(theta[i]);
  }
  const std::size_t count = std::size_t{1} << n;
  double sum = 0.0;
  for (std::size_t v = 0; v < count; ++v) {
    double lp = 0.0;
    for (int i = 0; i < n; ++i) lp += ((v >> i) & 1u) ? on[i] : off[i];
    out[static_cast<Eigen::Index>(v)] = std::exp(lp);
    sum += out[static_cast<Eigen::Index>(v)];
  }
  out /= sum;
}

}  // namespace

ZonosetParams::ZonosetParams(Eigen::MatrixXd W_, Eigen::VectorXd B_) : W(std::move(W_)), B(std::move(B_)) {
  if (W.cols() != B.size()) {
    throw DimensionError("ZonosetParams: W has " + std::to_string(W.cols()) + " columns but B has " +
                         std::to_string(B.size()) + " entries");
  }
  if (!W.allFinite() || !B.allFinite()) throw std::invalid_argument("ZonosetParams: non-finite entry");
}

ZonosetParams ZonosetParams::zeros(int m, int n) {
  return ZonosetParams(Eigen::MatrixXd::Zero(m, n), Eigen::VectorXd::Zero(n));
}

ZonosetParams ZonosetParams::random(int m, int n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd W(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) W(i, j) = scale * normal(rng);
  Eigen::VectorXd B(n);
  for (int j = 0; j < n; ++j) B[j] = scale * normal(rng);
  return ZonosetParams(std::move(W), std::move(B));
}

Eigen::MatrixXd zonoset(const ZonosetParams& params) {
  const int m = params.m();
  const std::size_t count = state_count(m);
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(count), params.n());
  for (std::size_t h = 0; h < count; ++h) {
    Eigen::RowVectorXd p = params.B.transpose();
    for (int i = 0; i < m; ++i)
      if ((h >> i) & 1u) p += params.W.row(i);
    pts.row(static_cast<Eigen::Index>(h)) = p;
  }
  return pts;
}

Kernel::Kernel(int m, int n, Eigen::MatrixXd rows) : m_(m), n_(n), k_(std::move(rows)) {
  const auto r = static_cast<Eigen::Index>(state_count(m));
  const auto c = static_cast<Eigen::Index>(state_count(n));
  if (k_.rows() != r || k_.cols() != c) {
    throw DimensionError("Kernel: expected " + std::to_string(r) + "x" + std::to_string(c) + " matrix");
  }
  for (Eigen::Index h = 0; h < r; ++h) {
    auto row = k_.row(h);
    for (Eigen::Index v = 0; v < c; ++v) {
      if (!std::isfinite(row[v])) throw std::invalid_argument("Kernel: non-finite entry");
      if (row[v] < 0.0) {
        if (row[v] < -1e-12) throw std::invalid_argument("Kernel: negative entry");
        row[v] = 0.0;
      }
    }
    const double s = row.sum();
    if (std::abs(s - 1.0) > kRowTolerance) {
      throw std::invalid_argument("Kernel: row " + std::to_string(h) + " sums to " + std::to_string(s));
    }
    row /= s;
  }
}

Dist Kernel::row(StateIndex h) const {
  const Eigen::RowVectorXd r = k_.row(h);
  return Dist(n_, std::vector<double>(r.data(), r.data() + r.size()));
}

Kernel zonoset_kernel(const ZonosetParams& params) {
  const int m = params.m();
  const int n = params.n();
  require_units(m + n, "zonoset_kernel");
  const Eigen::MatrixXd pts = zonoset(params);
  Eigen::MatrixXd K(pts.rows(), static_cast<Eigen::Index>(state_count(n)));
  for (Eigen::Index h = 0; h < pts.rows(); ++h) {
    fill_product_row(pts.row(h).transpose(), K.row(h));
  }
  return Kernel(m, n, std::move(K));
}

Dist apply(const Dist& q, const Kernel& K) {
  if (q.dim() != K.m()) {
    throw DimensionError("apply: input has dimension " + std::to_string(q.dim()) + " but kernel expects " +
                         std::to_string(K.m()));
  }
  const Eigen::RowVectorXd out = q.row() * K.matrix();
  return Dist(K.n(), std::vector<double>(out.data(), out.data() + out.size()));
}

Kernel compose(const Kernel& K1, const Kernel& K2) {
  if (K1.n() != K2.m()) {
    throw DimensionError("compose: inner dimensions " + std::to_string(K1.n()) + " and " +
                         std::to_string(K2.m()) + " differ");
  }
  return Kernel(K1.m(), K2.n(), K1.matrix() * K2.matrix());
}

Kernel shift_kernel(const Dist& p) {
  const auto count = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd K(count, count);
  for (Eigen::Index h = 0; h < count; ++h)
    for (Eigen::Index v = 0; v < count; ++v) K(h, v) = p[static_cast<std::size_t>(h ^ v)];
  return Kernel(p.dim(), p.dim(), std::move(K));
}

ZonosetParams face_uniform_params(const CubeFace& face, const NaturalParams& extra_bias, double alpha) {
  const int n = face.ambient_dim();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("face_uniform_params: alpha must be positive");
  if (extra_bias.size() != 0 && extra_bias.size() != n) throw DimensionError("face_uniform_params: bias size");
  ZonosetParams out = ZonosetParams::zeros(n, n);
  for (int i = 0; i < n; ++i) {
    if ((face.fixed_mask() >> i) & 1u) {
      const double sign = ((face.fixed_values() >> i) & 1u) ? -1.0 : 1.0;  // 1 - 2 h*_i
      out.W(i, i) = alpha * sign;
      out.B[i] = -0.5 * alpha * sign;
    } else if (extra_bias.size() != 0) {
      out.B[i] = extra_bias[i];
    }
  }
  return out;
}

double face_uniform_error_bound(const CubeFace& face, double alpha) {
  const int fixed = face.ambient_dim() - face.dimension();
  return std::max(1, fixed) * std::exp(-alpha / 2.0);
}

Kernel face_shift_kernel(const CubeFace& face, const NaturalParams& extra_bias) {
  const int n = face.ambient_dim();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  if (extra_bias.size() == n) theta = extra_bias;
  std::vector<double> p(state_count(n), 0.0);
  // Product on the free coordinates, point mass on the fixed ones.
  for (StateIndex v : face.member_indices()) {
    double lp = 0.0;
    for (int i = 0; i < n; ++i) {
      if ((face.fixed_mask() >> i) & 1u) continue;
      lp += ((v >> i) & 1u) ? -softplus(-theta[i]) : -softplus(theta[i]);
    }
    p[v] = std::exp(lp);
  }
  const Dist pd = Dist::from_weights(n, p);
  const auto count = static_cast<Eigen::Index>(pd.size());
  Eigen::MatrixXd K(count, count);
  for (Eigen::Index h = 0; h < count; ++h) {
    const auto hI = static_cast<StateIndex>(h) & face.fixed_mask();
    for (Eigen::Index v = 0; v < count; ++v) K(h, v) = pd[hI ^ static_cast<StateIndex>(v)];
  }
  return Kernel(n, n, std::move(K));
}

int kernel_rank(const Kernel& K, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K.matrix());
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double dim = static_cast<double>(std::max(K.matrix().rows(), K.matrix().cols()));
  const double threshold = rel_tol * s[0] * dim;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > threshold) ++rank;
  return rank;
}

MinorReport all_minors_nonzero(const Kernel& K, double rel_tol) {
  using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const MatrixL M = K.matrix().cast<long double>();
  const int rows = static_cast<int>(M.rows());
  const int cols = static_cast<int>(M.cols());
  if (rows > 16 || cols > 16) {
    throw CapacityError("all_minors_nonzero: minor enumeration is limited to 16x16 kernels");
  }

  MinorReport report;
  report.min_rel = std::numeric_limits<double>::infinity();
  const int top = std::min(rows, cols);
  report.min_abs_by_order.assign(top, std::numeric_limits<double>::infinity());

  auto subsets = [top](int size) {
    std::vector<std::vector<std::vector<int>>> by_count(top + 1);
    for (std::uint32_t mask = 1; mask < (1u << size); ++mask) {
      const int c = __builtin_popcount(mask);
      if (c > top) continue;
      std::vector<int> idx;
      for (int i = 0; i < size; ++i)
        if ((mask >> i) & 1u) idx.push_back(i);
      by_count[c].push_back(std::move(idx));
    }
    return by_count;
  };
  const auto row_sets = subsets(rows);
  const auto col_sets = subsets(cols);

  MatrixL sub;
  for (int k = 1; k <= top; ++k) {
    sub.resize(k, k);
    for (const auto& ri : row_sets[k])
      for (const auto& ci : col_sets[k]) {
        for (int a = 0; a < k; ++a)
          for (int b = 0; b < k; ++b) sub(a, b) = M(ri[a], ci[b]);
        const long double det = std::abs(k == 1 ? sub(0, 0) : sub.partialPivLu().determinant());
        long double hadamard = 1.0L;
        for (int a = 0; a < k; ++a) hadamard *= sub.row(a).norm();
        const double rel = hadamard > 0.0L ? static_cast<double>(det / hadamard) : 0.0;
        report.min_rel = std::min(report.min_rel, rel);
        report.min_abs_by_order[k - 1] = std::min(report.min_abs_by_order[k - 1], static_cast<double>(det));
        if (rel <= rel_tol) report.all_nonzero = false;
      }
  }
  return report;
}

bool monomial_factorization_check(const ZonosetParams& params, double tol) {
  const int m = params.m();
  const int n = params.n();
  require_units(m + n, "monomial_factorization_check");
  const Eigen::MatrixXd pts = zonoset(params);
  const std::size_t hc = state_count(m);
  const std::size_t vc = state_count(n);
  auto logk = [&](std::size_t h, std::size_t v) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      if ((v >> j) & 1u) s += pts(static_cast<Eigen::Index>(h), j);
    return s;
  };
  for (std::size_t h = 1; h < hc; ++h) {
    const std::size_t rest = (hc - 1) & ~h;
    for (std::size_t g = rest; g != 0; g = (g - 1) & rest) {
      if (g < h) continue;
      for (std::size_t v = 0; v < vc; ++v) {
        const double r = logk(h | g, v) - logk(h, v) - logk(g, v) + logk(0, v);
        if (!(std::abs(r) <= tol)) return false;
      }
    }
  }
  return true;
}

bool monomial_factorization_check(const Kernel& K, double tol) {
  const Eigen::MatrixXd& M = K.matrix();
  if ((M.array() <= 0.0).any()) return false;
  const Eigen::MatrixXd L = M.array().log().matrix();
  const std::size_t hc = static_cast<std::size_t>(M.rows());
  const auto vc = M.cols();
  for (std::size_t h = 1; h < hc; ++h) {
    const std::size_t rest = (hc - 1) & ~h;
    for (std::size_t g = rest; g != 0; g = (g - 1) & rest) {
      if (g < h) continue;
      const auto hg = static_cast<Eigen::Index>(h | g);
      const auto hi = static_cast<Eigen::Index>(h);
      const auto gi = static_cast<Eigen::Index>(g);
      const double f0 = L(hg, 0) - L(hi, 0) - L(gi, 0) + L(0, 0);
      for (Eigen::Index v = 1; v < vc; ++v) {
        const double f = L(hg, v) - L(hi, v) - L(gi, v) + L(0, v);
        if (!(std::abs(f - f0) <= tol)) return false;
      }
    }
  }
  return true;
}

double max_row_product_defect(const Kernel& K) {
  double worst = 0.0;
  for (Eigen::Index h = 0; h < K.matrix().rows(); ++h) {
    worst = std::max(worst, product_defect(K.row(static_cast<StateIndex>(h))));
  }
  return worst;
}

std::vector<StateIndex> zonoset_signs(const ZonosetParams& params) {
  const Eigen::MatrixXd pts = zonoset(params);
  std::vector<StateIndex> out(static_cast<std::size_t>(pts.rows()));
  for (Eigen::Index h = 0; h < pts.rows(); ++h) {
    StateIndex s = 0;
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
      if (pts(h, j) == 0.0) throw std::domain_error("zonoset_signs: point on a coordinate hyperplane");
      if (pts(h, j) > 0.0) s |= StateIndex{1} << j;
    }
    out[static_cast<std::size_t>(h)] = s;
  }
  return out;
}

}  // namespace zk
