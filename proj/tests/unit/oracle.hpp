#pragma once

// Brute-force references for the tests. Everything here works from the raw
// parameters with plain loops over joint states; nothing calls into the
// library's evaluation code.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "zk/models.hpp"

namespace oracle {

inline int bit(std::uint64_t x, int i) { return static_cast<int>((x >> i) & 1u); }

// Layer states packed into one integer, layer 0 in the low bits.
struct Layout {
  std::vector<int> widths;
  std::vector<int> offset;
  int total = 0;
  explicit Layout(std::vector<int> w) : widths(std::move(w)) {
    for (int n : widths) {
      offset.push_back(total);
      total += n;
    }
  }
  std::uint64_t layer(std::uint64_t joint, int k) const {
    return (joint >> offset[k]) & ((std::uint64_t{1} << widths[k]) - 1);
  }
};

// h^k W^k h^(k-1) with W^k of shape n_k x n_(k-1).
inline double coupling(const Eigen::MatrixXd& W, std::uint64_t upper, std::uint64_t lower) {
  double s = 0.0;
  for (int i = 0; i < W.rows(); ++i)
    for (int j = 0; j < W.cols(); ++j)
      if (bit(upper, i) && bit(lower, j)) s += W(i, j);
  return s;
}

inline double bias_term(const Eigen::VectorXd& b, std::uint64_t x) {
  double s = 0.0;
  for (int i = 0; i < b.size(); ++i)
    if (bit(x, i)) s += b[i];
  return s;
}

inline std::vector<double> normalised(std::vector<double> w) {
  double z = 0.0;
  for (double x : w) z += x;
  for (double& x : w) x /= z;
  return w;
}

inline std::vector<double> rbm(const zk::RbmParams& p) {
  const int n = p.n(), m = p.m();
  std::vector<double> out(std::size_t{1} << n, 0.0);
  for (std::uint64_t v = 0; v < out.size(); ++v)
    for (std::uint64_t h = 0; h < (std::uint64_t{1} << m); ++h)
      out[v] += std::exp(coupling(p.W, h, v) + bias_term(p.B, v) + bias_term(p.C, h));
  return normalised(out);
}

// Joint of the top RBM times the downward sigmoid conditionals, summed over
// every hidden configuration.
inline std::vector<double> dbn(const zk::DbnParams& p) {
  const Layout L(p.widths);
  const int l = p.depth();
  std::vector<double> out(std::size_t{1} << p.widths[0], 0.0);
  std::vector<double> top_weight(std::uint64_t{1} << (L.widths[l - 1] + L.widths[l]));
  double z = 0.0;
  for (std::uint64_t hv = 0; hv < top_weight.size(); ++hv) {
    const std::uint64_t lo = hv & ((std::uint64_t{1} << L.widths[l - 1]) - 1);
    const std::uint64_t hi = hv >> L.widths[l - 1];
    top_weight[hv] = std::exp(coupling(p.weights[l - 1], hi, lo) + bias_term(p.biases[l - 1], lo) +
                              bias_term(p.biases[l], hi));
    z += top_weight[hv];
  }
  for (std::uint64_t joint = 0; joint < (std::uint64_t{1} << L.total); ++joint) {
    const std::uint64_t hv = L.layer(joint, l - 1) | (L.layer(joint, l) << L.widths[l - 1]);
    double w = top_weight[hv] / z;
    for (int k = l - 1; k >= 1 && w > 0.0; --k) {
      const std::uint64_t upper = L.layer(joint, k);
      const std::uint64_t lower = L.layer(joint, k - 1);
      for (int j = 0; j < L.widths[k - 1]; ++j) {
        double a = p.biases[k - 1][j];
        for (int i = 0; i < L.widths[k]; ++i)
          if (bit(upper, i)) a += p.weights[k - 1](i, j);
        const double on = 1.0 / (1.0 + std::exp(-a));
        w *= bit(lower, j) ? on : 1.0 - on;
      }
    }
    out[L.layer(joint, 0)] += w;
  }
  return out;
}

// Fully undirected stack: exp of the total energy over every unit.
inline std::vector<double> dbm(const zk::DbnParams& p) {
  const Layout L(p.widths);
  std::vector<double> out(std::size_t{1} << p.widths[0], 0.0);
  for (std::uint64_t joint = 0; joint < (std::uint64_t{1} << L.total); ++joint) {
    double e = 0.0;
    for (int k = 0; k <= p.depth(); ++k) e += bias_term(p.biases[k], L.layer(joint, k));
    for (int k = 1; k <= p.depth(); ++k) e += coupling(p.weights[k - 1], L.layer(joint, k), L.layer(joint, k - 1));
    out[L.layer(joint, 0)] += std::exp(e);
  }
  return normalised(out);
}

// Product distribution with natural parameters theta, entry by entry.
inline std::vector<double> product(const Eigen::VectorXd& theta) {
  const int n = static_cast<int>(theta.size());
  std::vector<double> out(std::size_t{1} << n);
  for (std::uint64_t v = 0; v < out.size(); ++v) out[v] = std::exp(bias_term(theta, v));
  return normalised(out);
}

}  // namespace oracle
