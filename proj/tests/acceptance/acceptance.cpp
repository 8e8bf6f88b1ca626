// End-to-end acceptance checks. One PASS/FAIL line per criterion with its
// runtime; the exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "../unit/oracle.hpp"
#include "zk/distributions.hpp"
#include "zk/divergence.hpp"
#include "zk/io.hpp"
#include "zk/kernels.hpp"
#include "zk/models.hpp"
#include "zk/sharing.hpp"

#ifndef ZK_CLI_PATH
#error "ZK_CLI_PATH must name the zk executable"
#endif

using namespace zk;
namespace fs = std::filesystem;

namespace {

const double kLn2 = std::log(2.0);

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Outcome marginals_exact() {
  auto rng = make_rng(101);
  std::uniform_int_distribution<int> width(1, 3);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    std::vector<int> widths;
    int total = 0;
    const int layers = 2 + t % 3;
    for (int k = 0; k < layers; ++k) {
      const int w = width(rng);
      if (total + w > 10) break;
      widths.push_back(w);
      total += w;
    }
    if (widths.size() < 2) widths = {2, 2};
    const DbnParams p = DbnParams::random(widths, rng, 2.0);
    worst = std::max(worst, max_abs(dbn_dist(p).probs(), oracle::dbn(p)));
    worst = std::max(worst, max_abs(dbm_dist(p).probs(), oracle::dbm(p)));
    const RbmParams r = top_rbm(DbnParams::random({widths[0], widths[1]}, rng, 2.0));
    worst = std::max(worst, max_abs(rbm_dist(r).probs(), oracle::rbm(r)));
  }
  return {worst <= 1e-12, "max error " + fmt(worst)};
}

Outcome face_realisation() {
  auto rng = make_rng(102);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  bool supports = true;
  for (const auto& face : all_faces(3)) {
    Eigen::VectorXd bias(3);
    for (int i = 0; i < 3; ++i) bias[i] = normal(rng);
    // p on the face, then the target K(h, v) = p(h_I xor v) entry by entry.
    std::vector<double> p(8, 0.0);
    double z = 0.0;
    for (StateIndex v = 0; v < 8; ++v) {
      if (!face.contains(v)) continue;
      double e = 0.0;
      for (int i = 0; i < 3; ++i)
        if (!((face.fixed_mask() >> i) & 1u) && ((v >> i) & 1u)) e += bias[i];
      z += (p[v] = std::exp(e));
    }
    const Kernel K = zonoset_kernel(face_uniform_params(face, bias, 40.0));
    for (StateIndex h = 0; h < 8; ++h)
      for (StateIndex v = 0; v < 8; ++v) {
        const double target = p[(h & face.fixed_mask()) ^ v] / z;
        worst = std::max(worst, std::abs(K(h, v) - target));
        supports = supports && ((target == 0.0) == (K(h, v) < 1e-6));
        if ((h & ~face.fixed_mask()) == 0) {
          worst = std::max(worst, std::abs(K(h, v) - p[h ^ v] / z));
        }
      }
  }
  return {worst < 1e-6 && supports, "27 faces, sup error " + fmt(worst) + (supports ? "" : ", support mismatch")};
}

Outcome minors_and_rank() {
  auto rng = make_rng(103);
  std::normal_distribution<double> normal(0.0, 1.0);
  int minors_ok = 0, rank_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::RowVector2d c(normal(rng), normal(rng));
    Eigen::MatrixXd W(2, 2);
    W.row(0) = normal(rng) * c;
    W.row(1) = normal(rng) * c;
    const Eigen::VectorXd B = Eigen::Vector2d(normal(rng), normal(rng));
    minors_ok += all_minors_nonzero(zonoset_kernel(ZonosetParams(W, B))).all_nonzero;
    rank_ok += kernel_rank(zonoset_kernel(ZonosetParams::random(3, 3, rng))) == 8;
  }
  return {minors_ok >= 99 && rank_ok >= 99,
          "minors " + std::to_string(minors_ok) + "/100, full rank " + std::to_string(rank_ok) + "/100"};
}

Outcome path_sharing() {
  auto rng = make_rng(104);
  std::uniform_int_distribution<int> step(-1, 2);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  double worst = 0.0;
  int families = 0;
  while (families < 20) {
    const int count = 1 + static_cast<int>(rng() % 3);
    std::vector<Path> paths;
    for (int i = 0; i < count; ++i) {
      std::vector<StateIndex> s{static_cast<StateIndex>(rng() % 8)};
      for (int t = 1; t < 4; ++t) {
        const int b = step(rng);
        s.push_back(b < 0 ? s.back() : s.back() ^ (StateIndex{1} << b));
      }
      paths.emplace_back(3, std::move(s));
    }
    const PathFamily fam(3, std::move(paths));
    if (!is_valid_path_family(fam, true) || !sharing_compatible(fam)) continue;
    ++families;
    std::vector<double> w(8, 0.0);
    for (const auto& p : fam.paths()) w[p.states().back()] = gamma(rng) + 1e-3;
    const Dist target = Dist::from_weights(3, w);
    const DbnParams dbn = layers_from_path_family(fam, target, 30.0);
    if (dbn.widths != std::vector<int>(5, 3)) return {false, "unexpected layer widths"};
    worst = std::max(worst, total_variation(dbn_dist(dbn), target));
  }
  return {worst <= 1e-3, "20 families, worst TV " + fmt(worst)};
}

Outcome mixtures() {
  auto rng = make_rng(105);
  std::normal_distribution<double> normal(0.0, 1.5);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    std::vector<Dist> targets;
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd B(4);
      for (int j = 0; j < 4; ++j) B[j] = normal(rng);
      targets.push_back(product_distribution(B));
    }
    std::vector<double> w(3);
    double s = 0.0;
    for (double& x : w) s += (x = gamma(rng));
    for (double& x : w) x /= s;
    const DbnParams p = construct_mixture_dbn(targets, w, 30.0);
    if (p.widths != std::vector<int>{4, 2, 2}) return {false, "unexpected layer widths"};
    worst = std::max(worst, total_variation(dbn_dist(p), mixture(targets, w)));
  }
  return {worst <= 1e-2, "20 mixtures, worst TV " + fmt(worst)};
}

Outcome partition_inside_dbn() {
  const int n = 6, l = 3;
  const auto bound = dbn_error_bounds(n, l);
  if (!bound || bound->K != 2) return {false, "unexpected K"};
  const Partition rho = Partition::cylinder(n, {0, 1});
  const DirichletParams prior = DirichletParams::symmetric(n, 1.0);
  double worst_d = 0.0, worst_gap = 0.0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const Dist p = sample_dirichlet(prior, derive_seed(106, t));
    std::vector<double> blocks(4, 0.0);
    for (StateIndex x = 0; x < p.size(); ++x) blocks[rho.block_of(x)] += p[x];
    const Dist q = dbn_dist(realize_partition_model(n, l, {0, 1}, {2, 3}, blocks, 30.0));
    const double d = kl(p, q);
    worst_d = std::max(worst_d, d);
    worst_gap = std::max(worst_gap, std::abs(d - kl_to_partition(p, rho).divergence));
  }
  const bool ok = worst_d <= 4 * kLn2 + 0.01 && worst_gap <= 0.01;
  return {ok, "max D " + fmt(worst_d) + " nats (bound " + fmt(bound->max_nats) + "), max gap to projection " +
                  fmt(worst_gap)};
}

Outcome expected_error_mc() {
  const std::vector<std::pair<int, int>> cases{{2, 1}, {3, 1}, {3, 2}, {4, 2}};
  std::string detail;
  bool ok = true;
  for (auto [n, K] : cases) {
    std::vector<int> lambda;
    for (int i = 0; i < K; ++i) lambda.push_back(i);
    const Partition rho = Partition::cylinder(n, lambda);
    const DirichletParams a = DirichletParams::symmetric(n, 1.0);
    const double exact = expected_kl_partition_dirichlet(a, rho);
    const auto est = monte_carlo_expected_kl(rho, a, 200000, 107);
    const double z = (est.mean - exact) / est.se;
    ok = ok && std::abs(z) < 3.0;
    detail += "(" + std::to_string(n) + "," + std::to_string(K) + ") z=" + fmt(z) + " ";
  }
  const double ref = expected_kl_partition_dirichlet(DirichletParams::symmetric(2, 1.0), Partition::cylinder(2, {0}));
  ok = ok && std::abs(ref - (kLn2 - 0.5)) < 1e-12;
  return {ok, detail + "(2,1) closed form " + fmt(ref)};
}

Outcome expected_bound_exact() {
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n) {
    for (int l = 3; l <= 40; ++l) {
      const auto b = dbn_error_bounds(n, l);
      std::vector<int> lambda;
      for (int i = 0; i < b->K; ++i) lambda.push_back(i);
      const double direct = expected_kl_partition_dirichlet(DirichletParams::symmetric(n, 1.0),
                                                            Partition::cylinder(n, lambda));
      const int d = n - b->K;
      double h = 0.0;
      for (long long i = 1; i <= (1LL << d); ++i) h += 1.0 / static_cast<double>(i);
      const double formula = d == 0 ? 0.0 : 1.0 + d * kLn2 - h;
      worst = std::max({worst, std::abs(b->expected_nats - direct), std::abs(b->expected_nats - formula)});
    }
  }
  return {worst <= 1e-12, "max disagreement " + fmt(worst)};
}

Outcome vertex_attainment() {
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n)
    for (int K = 0; K <= n; ++K) {
      std::vector<int> lambda;
      for (int i = 0; i < K; ++i) lambda.push_back(i);
      const Partition rho = Partition::cylinder(n, lambda);
      double best = 0.0;
      for (StateIndex x = 0; x < (StateIndex{1} << n); ++x)
        best = std::max(best, kl_to_partition(Dist::point(n, x), rho).divergence);
      worst = std::max({worst, std::abs(best - (n - K) * kLn2), std::abs(max_kl_partition(rho) - (n - K) * kLn2)});
    }
  return {worst <= 1e-12, "max deviation " + fmt(worst)};
}

// Runs the CLI with stdout captured to a file and returns the exit status.
int run_cli(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = std::string("\"") + ZK_CLI_PATH + "\" " + args + " > \"" + stdout_file.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = io::read_file(e.path().string());
  return out;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("zk_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::vector<std::pair<std::string, int>> commands{
      {"kernel --face \"n=3,I=1,val=1\" --alpha 40", 0},
      {"kernel --random --m 4 --n 4 --seed 7", 0},
      {"kernel --uniform-faces --n 4", 0},
      {"verify 1 --seed 3", 0},
      {"verify 4 --seed 3", 0},
      {"verify 11 --seed 3", 0},
      {"bounds --n 6 --l 3,5,17 --mc 20000 --seed 5", 0},
      {"bounds --n 6 --l 3,5,17 --format json", 0},
      {"figures f2-zonosets --seed 9", 0},
      {"figures f3-uK", 0},
      {"figures f4-kernels", 0},
  };
  std::string detail;
  bool ok = true;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::map<std::string, std::string> runs[2];
    for (int r = 0; r < 2; ++r) {
      const fs::path dir = root / ("c" + std::to_string(c)) / ("run" + std::to_string(r));
      fs::create_directories(dir / "out");
      const int code = run_cli(commands[c].first + " --out \"" + (dir / "out").string() + "\"", dir / "stdout.txt");
      if (code != commands[c].second) {
        ok = false;
        detail += "'" + commands[c].first + "' exited " + std::to_string(code) + "; ";
      }
      runs[r] = snapshot(dir);
      if (runs[r].size() < 2) {
        ok = false;
        detail += "'" + commands[c].first + "' wrote nothing; ";
      }
    }
    if (runs[0] != runs[1]) {
      ok = false;
      detail += "'" + commands[c].first + "' differs between runs; ";
    }
  }

  // CSV round trip of a CLI kernel against the in-process computation.
  const fs::path csv = root / "random.csv";
  if (run_cli("kernel --random --m 3 --n 3 --seed 7", csv) != 0) return {false, detail + "kernel csv run failed"};
  auto rng = make_rng(7);
  const Kernel direct = zonoset_kernel(ZonosetParams::random(3, 3, rng));
  const Kernel parsed = io::kernel_from_csv(io::read_file(csv.string()));
  const double err = (parsed.matrix() - direct.matrix()).cwiseAbs().maxCoeff();
  const Kernel again = io::kernel_from_csv(io::kernel_to_csv(parsed));
  const double err2 = (again.matrix() - parsed.matrix()).cwiseAbs().maxCoeff();
  ok = ok && err <= 1e-15 && err2 <= 1e-15;
  fs::remove_all(root);
  return {ok, detail + std::to_string(commands.size()) + " commands twice, csv round trip " + fmt(std::max(err, err2))};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exact marginals vs joint enumeration", 10, marginals_exact},
      {2, "face kernels at alpha=40", 5, face_realisation},
      {3, "nonzero minors and full rank", 30, minors_and_rank},
      {4, "path family sharing, n=3, 4 steps", 10, path_sharing},
      {5, "mixtures of three products in DBN(4,2,2)", 20, mixtures},
      {6, "partition model inside DBN, n=6, l=3", 60, partition_inside_dbn},
      {7, "expected divergence vs Monte Carlo", 60, expected_error_mc},
      {8, "expected bound vs Dirichlet expectation", 1, expected_bound_exact},
      {9, "point measures attain the maximum", 10, vertex_attainment},
      {10, "CLI determinism and CSV round trip", 120, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s %2d  %-42s %8.3f s  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs, o.detail.c_str(),
                in_time ? "" : " (over time budget)");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
