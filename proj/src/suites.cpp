#include "zk/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "zk/distributions.hpp"
#include "zk/divergence.hpp"
#include "zk/hypercube.hpp"
#include "zk/kernels.hpp"
#include "zk/models.hpp"
#include "zk/sharing.hpp"

namespace zk::suites {

namespace {

double sup_abs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

Eigen::VectorXd normal_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

double tolerance(const Options& o, double fallback) { return o.tol > 0.0 ? o.tol : fallback; }

void tally(Report& r, double error, bool failed) {
  ++r.trials;
  r.worst_error = std::max(r.worst_error, error);
  if (failed) ++r.failures;
}

Report face_rows(const Options& o) {
  Report r;
  r.prop = "1";
  r.tolerance = tolerance(o, 1e-6);
  auto rng = make_rng(o.seed);
  for (const auto& face : all_faces(3)) {
    const Eigen::VectorXd bias = normal_vector(3, rng);
    const Kernel got = zonoset_kernel(face_uniform_params(face, bias, o.alpha));
    const Kernel want = face_shift_kernel(face, bias);
    double err = sup_abs(got.matrix(), want.matrix());
    bool support_ok = true;
    for (Eigen::Index h = 0; h < 8; ++h)
      for (Eigen::Index v = 0; v < 8; ++v)
        support_ok = support_ok && ((want(h, v) > 0.0) == (got(h, v) > r.tolerance));
    tally(r, err, !(err < r.tolerance) || !support_ok);
  }
  r.pass = r.failures == 0;
  return r;
}

Report minors(const Options& o) {
  Report r;
  r.prop = "3";
  r.tolerance = tolerance(o, 1e-16);
  auto rng = make_rng(o.seed);
  double smallest = 1.0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd C = normal_vector(2, rng);
    const Eigen::VectorXd a = normal_vector(2, rng);
    ZonosetParams p(a * C.transpose(), normal_vector(2, rng));
    const auto rep = all_minors_nonzero(zonoset_kernel(p), r.tolerance);
    smallest = std::min(smallest, rep.min_rel);
    tally(r, 0.0, !rep.all_nonzero);
  }
  r.worst_error = smallest;
  r.pass = r.failures <= 1;
  r.detail = "worst_error is the smallest minor relative to its Hadamard bound";
  return r;
}

Report full_rank(const Options& o) {
  Report r;
  r.prop = "4";
  r.tolerance = tolerance(o, 1e-9);
  auto rng = make_rng(o.seed);
  for (int t = 0; t < 100; ++t) {
    const int rank = kernel_rank(zonoset_kernel(ZonosetParams::random(3, 3, rng)), r.tolerance);
    tally(r, 8 - rank, rank != 8);
  }
  r.pass = r.failures <= 1;
  r.detail = "worst_error is the largest rank deficit";
  return r;
}

Dist random_product(int n, std::mt19937_64& rng, double scale = 2.0) {
  return product_distribution(normal_vector(n, rng, scale));
}

Report affine_rows(const Options& o) {
  Report r;
  r.prop = "5.1";
  r.tolerance = tolerance(o, 1e-9);
  auto rng = make_rng(o.seed);
  std::uniform_int_distribution<int> dim(1, 3);
  for (int t = 0; t < 100; ++t) {
    const int m = dim(rng);
    const int n = dim(rng);
    std::vector<Dist> targets;
    for (int k = 0; k <= m; ++k) targets.push_back(random_product(n, rng));
    std::vector<StateIndex> anchors{0};
    for (int i = 0; i < m; ++i) anchors.push_back(StateIndex{1} << i);
    const Kernel K = zonoset_kernel(construct_affine_rows(targets, anchors, m));
    double err = 0.0;
    for (int k = 0; k <= m; ++k) err = std::max(err, sup_norm(K.row(anchors[k]), targets[k]));
    tally(r, err, !(err < r.tolerance));
  }
  r.pass = r.failures == 0;
  return r;
}

Report partition_rows(const Options& o) {
  Report r;
  r.prop = "5.3";
  r.tolerance = tolerance(o, 1e-6);
  auto rng = make_rng(o.seed);
  for (int m = 1; m <= 4; ++m) {
    for (int n = 1; n <= 4; ++n) {
      for (int K = 0; K <= std::min(m, n); ++K) {
        std::vector<int> lam(n), Lam(m);
        std::iota(lam.begin(), lam.end(), 0);
        std::iota(Lam.begin(), Lam.end(), 0);
        std::shuffle(lam.begin(), lam.end(), rng);
        std::shuffle(Lam.begin(), Lam.end(), rng);
        lam.resize(K);
        Lam.resize(K);
        const Kernel Kmat = zonoset_kernel(construct_partition_rows(m, n, lam, Lam, o.alpha));
        double err = 0.0;
        for (std::size_t h = 0; h < (std::size_t{1} << m); ++h) {
          // Rows on the face with free coordinates Lambda and zeros elsewhere.
          bool on_face = true;
          for (int i = 0; i < m; ++i)
            if (((h >> i) & 1u) && std::find(Lam.begin(), Lam.end(), i) == Lam.end()) on_face = false;
          if (!on_face) continue;
          const double mass = 1.0 / static_cast<double>(std::size_t{1} << (n - K));
          for (std::size_t v = 0; v < (std::size_t{1} << n); ++v) {
            bool in_block = true;
            for (int j = 0; j < K; ++j) in_block = in_block && (((v >> lam[j]) & 1u) == ((h >> Lam[j]) & 1u));
            err = std::max(err, std::abs(Kmat(static_cast<StateIndex>(h), static_cast<StateIndex>(v)) -
                                         (in_block ? mass : 0.0)));
          }
        }
        tally(r, err, !(err < r.tolerance));
      }
    }
  }
  r.pass = r.failures == 0;
  return r;
}

EdgeSharingSpec random_edge_spec(int n, std::mt19937_64& rng, double omega) {
  std::uniform_real_distribution<double> prob(0.05, 0.95);
  std::uniform_int_distribution<int> coin(0, 3);
  for (;;) {
    EdgeSharingSpec spec;
    spec.omega = omega;
    std::vector<int> units(n);
    std::iota(units.begin(), units.end(), 0);
    std::shuffle(units.begin(), units.end(), rng);
    const int count = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    std::set<StateIndex> used;
    bool ok = true;
    for (int c = 0; c < count && ok; ++c) {
      EdgeShare e;
      e.unit = units[c];
      e.anchor = static_cast<StateIndex>(rng() % (std::uint64_t{1} << n));
      if (coin(rng) != 0 && n > 1) {
        int rbit = static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
        if (rbit >= e.unit) ++rbit;
        e.edge_bit = rbit;
      }
      e.p_anchor = prob(rng);
      e.p_partner = prob(rng);
      ok = used.insert(e.anchor).second;
      if (ok && e.edge_bit) ok = used.insert(e.anchor ^ (StateIndex{1} << *e.edge_bit)).second;
      spec.entries.push_back(e);
    }
    if (ok) return spec;
  }
}

Report edge_sharing(const Options& o) {
  Report r;
  r.prop = "5.4";
  r.tolerance = tolerance(o, 1e-5);
  auto rng = make_rng(o.seed);
  for (int t = 0; t < 100; ++t) {
    const EdgeSharingSpec spec = random_edge_spec(3, rng, o.omega);
    const Kernel got = zonoset_kernel(construct_edge_sharing_layer(spec, 3));
    const double err = sup_abs(got.matrix(), edge_sharing_limit(spec, 3).matrix());
    tally(r, err, !(err < r.tolerance));
  }
  r.pass = r.failures == 0;
  return r;
}

Report mixture_dbn(const Options& o) {
  Report r;
  r.prop = "6";
  r.tolerance = tolerance(o, 1e-2);
  auto rng = make_rng(o.seed);
  for (int t = 0; t < 20; ++t) {
    std::vector<Dist> targets;
    for (int k = 0; k < 3; ++k) targets.push_back(random_product(4, rng));
    std::gamma_distribution<double> gamma(1.0, 1.0);
    std::vector<double> w(3);
    double s = 0.0;
    for (double& x : w) s += (x = gamma(rng));
    for (double& x : w) x /= s;
    const Dist want = mixture(targets, w);
    const Dist got = dbn_dist(construct_mixture_dbn(targets, w, o.omega));
    const double err = total_variation(got, want);
    tally(r, err, !(err <= r.tolerance));
  }
  r.pass = r.failures == 0;
  return r;
}

Dist dirichlet_on(int n, const std::vector<StateIndex>& states, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> w(std::size_t{1} << n, 0.0);
  for (StateIndex x : states) w[x] = gamma(rng) + 1e-3;
  return Dist::from_weights(n, w);
}

PathFamily random_family(int n, int length, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> step(-1, n - 1);
  for (;;) {
    const int count = 1 + static_cast<int>(rng() % 2);
    std::vector<Path> paths;
    for (int i = 0; i < count; ++i) {
      std::vector<StateIndex> s{static_cast<StateIndex>(rng() % (std::uint64_t{1} << n))};
      for (int t = 1; t < length; ++t) {
        const int b = step(rng);
        s.push_back(b < 0 ? s.back() : s.back() ^ (StateIndex{1} << b));
      }
      paths.emplace_back(n, std::move(s));
    }
    PathFamily fam(n, std::move(paths));
    if (is_valid_path_family(fam, true) && sharing_compatible(fam)) return fam;
  }
}

Report vertex_sweep(const Options& o) {
  Report r;
  r.prop = "9";
  r.tolerance = tolerance(o, 1e-3);
  auto rng = make_rng(o.seed);
  for (int t = 0; t < 20; ++t) {
    const PathFamily fam = t == 0 ? PathFamily(3, {Path(3, {0, 1, 3, 7})}) : random_family(3, 4, rng);
    const Dist target = dirichlet_on(3, fam.visited_states(), rng);
    const Dist got = dbn_dist(layers_from_path_family(fam, target, o.omega));
    const double err = total_variation(got, target);
    tally(r, err, !(err <= r.tolerance));
  }
  r.pass = r.failures == 0;
  return r;
}

Report face_cover(const Options& o) {
  Report r;
  r.prop = "10";
  r.tolerance = tolerance(o, 1e-3);
  auto rng = make_rng(o.seed);
  struct Case {
    std::vector<CubeFace> faces;
    std::optional<int> length;
  };
  // Exact evaluation caps these at 24 units: n (length + 1) <= 24.
  const std::vector<Case> cases{
      {{CubeFace::whole(2)}, std::nullopt},
      {{CubeFace::whole(4)}, std::nullopt},
      {{CubeFace(4, {2, 3}, {0, 1}), CubeFace(4, {0, 1}, {1, 0})}, std::nullopt},
      {{CubeFace(3, {2}, {1})}, 4},
  };
  for (const auto& [faces, length] : cases) {
    const PathFamily fam = face_cover_family(faces, length);
    std::set<StateIndex> want;
    for (const auto& f : faces)
      for (StateIndex x : f.member_indices()) want.insert(x);
    const auto visited = fam.visited_states();
    const bool covers = std::includes(visited.begin(), visited.end(), want.begin(), want.end());
    const bool valid = static_cast<bool>(is_valid_path_family(fam, true));
    const Dist target = dirichlet_on(fam.dim(), {want.begin(), want.end()}, rng);
    const double err = total_variation(dbn_dist(layers_from_path_family(fam, target, o.omega)), target);
    tally(r, err, !covers || !valid || !(err <= r.tolerance));
  }
  r.pass = r.failures == 0;
  return r;
}

Report partition_model(const Options& o) {
  Report r;
  r.prop = "11";
  r.tolerance = tolerance(o, 1e-3);
  auto rng = make_rng(o.seed);
  struct Case {
    int n, l;
    std::vector<int> lambda, Lambda;
  };
  const std::vector<Case> cases{
      {6, 3, {0, 1}, {2, 3}},
      {4, 5, {0, 1, 2, 3}, {0, 1, 2, 3}},
      {5, 3, {4}, {0}},
      {3, 2, {}, {}},
  };
  for (const auto& c : cases) {
    for (int t = 0; t < 5; ++t) {
      const int blocks = 1 << c.lambda.size();
      std::gamma_distribution<double> gamma(1.0, 1.0);
      std::vector<double> w(blocks);
      double s = 0.0;
      for (double& x : w) s += (x = gamma(rng));
      for (double& x : w) x /= s;
      const Dist want = partition_model_member(Partition::cylinder(c.n, c.lambda), w);
      const Dist got = dbn_dist(realize_partition_model(c.n, c.l, c.lambda, c.Lambda, w, o.omega));
      const double err = total_variation(got, want);
      tally(r, err, !(err <= r.tolerance));
    }
  }
  r.pass = r.failures == 0;
  return r;
}

const std::map<std::string, std::function<Report(const Options&)>>& registry() {
  static const std::map<std::string, std::function<Report(const Options&)>> table{
      {"1", face_rows},      {"3", minors},         {"4", full_rank},   {"5.1", affine_rows},
      {"5.3", partition_rows}, {"5.4", edge_sharing}, {"6", mixture_dbn}, {"9", vertex_sweep},
      {"10", face_cover},    {"11", partition_model},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids{"1", "3", "4", "5.1", "5.3", "5.4", "6", "9", "10", "11"};
  return ids;
}

bool has_suite(const std::string& id) { return registry().count(id) != 0; }

Report run(const std::string& id, const Options& options) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw std::invalid_argument("unknown suite '" + id + "'");
  return it->second(options);
}

nlohmann::json to_json(const Report& r) {
  nlohmann::json j{{"prop", r.prop},
                   {"trials", r.trials},
                   {"failures", r.failures},
                   {"worst_error", r.worst_error},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}};
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

}  // namespace zk::suites
