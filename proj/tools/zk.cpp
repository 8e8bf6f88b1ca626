// zk: verification suites, bound tables and figure data.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zk/distributions.hpp"
#include "zk/divergence.hpp"
#include "zk/errors.hpp"
#include "zk/hypercube.hpp"
#include "zk/io.hpp"
#include "zk/kernels.hpp"
#include "zk/models.hpp"
#include "zk/sharing.hpp"
#include "zk/suites.hpp"

namespace {

using nlohmann::json;
using zk::io::format_double;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  double alpha = 40.0;
  double omega = 30.0;
  double tol = -1.0;
  std::string out;
  std::uint64_t mc = 0;
  std::string format = "csv";
  std::string config;
};

class Sink {
 public:
  explicit Sink(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }
  bool to_stdout() const { return dir_.empty(); }

  void put(const std::string& name, const std::string& content) const {
    if (dir_.empty()) {
      std::cout << content;
    } else {
      zk::io::write_file((std::filesystem::path(dir_) / name).string(), content);
    }
  }

 private:
  std::string dir_;
};

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

// Values from the config file fill options the command line left unset.
void apply_config(const json& cfg, const std::vector<CLI::App*>& apps, const std::vector<std::string>& extra_keys) {
  if (!cfg.is_object()) throw UsageError("config: top level must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") throw UsageError("config: nested config files are not supported");
    if (std::find(extra_keys.begin(), extra_keys.end(), key) != extra_keys.end()) continue;
    CLI::Option* opt = nullptr;
    for (auto* app : apps) {
      try {
        opt = app->get_option("--" + key);
        break;
      } catch (const CLI::OptionNotFound&) {
      }
    }
    if (!opt) throw UsageError("config: unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    std::vector<json> items = value.is_array() ? value.get<std::vector<json>>() : std::vector<json>{value};
    for (const auto& item : items) {
      if (item.is_string()) {
        opt->add_result(item.get<std::string>());
      } else if (item.is_boolean()) {
        opt->add_result(item.get<bool>() ? "true" : "false");
      } else if (item.is_number_integer()) {
        opt->add_result(std::to_string(item.get<long long>()));
      } else if (item.is_number()) {
        opt->add_result(format_double(item.get<double>()));
      } else {
        throw UsageError("config: unsupported value for '" + key + "'");
      }
    }
    opt->run_callback();
  }
}

std::vector<std::string> split_any(const std::string& text, const std::string& seps) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

int parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError(what + ": expected an integer, got '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError(what + ": expected a number, got '" + s + "'");
  return v;
}

struct FaceSpec {
  zk::CubeFace face;
  zk::NaturalParams bias;
};

// "n=3,I=1;2,val=1;0,bias=0.5;0;-1" with 1-based coordinates; list items are
// separated by ';', '+' or spaces.
FaceSpec parse_face(const std::string& spec) {
  std::optional<int> n;
  std::vector<int> coords;
  std::vector<int> vals;
  std::vector<double> bias;
  for (const auto& field : split_any(spec, ",")) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw UsageError("face: expected key=value, got '" + field + "'");
    const std::string key = field.substr(0, eq);
    const auto items = split_any(field.substr(eq + 1), "; +");
    if (key == "n") {
      if (items.size() != 1) throw UsageError("face: n takes one value");
      n = parse_int(items[0], "face n");
    } else if (key == "I") {
      for (const auto& s : items) coords.push_back(parse_int(s, "face I") - 1);
    } else if (key == "val" || key == "vals") {
      for (const auto& s : items) vals.push_back(parse_int(s, "face val"));
    } else if (key == "bias") {
      for (const auto& s : items) bias.push_back(parse_double(s, "face bias"));
    } else {
      throw UsageError("face: unknown key '" + key + "'");
    }
  }
  if (!n) throw UsageError("face: missing n");
  if (coords.size() != vals.size()) throw UsageError("face: I and val lists differ in length");
  for (int c : coords) {
    if (c < 0 || c >= *n) throw UsageError("face: coordinate " + std::to_string(c + 1) + " outside 1.." + std::to_string(*n));
  }
  zk::NaturalParams b = zk::NaturalParams::Zero(*n);
  if (!bias.empty()) {
    if (static_cast<int>(bias.size()) != *n) throw UsageError("face: bias needs n values");
    for (int i = 0; i < *n; ++i) b[i] = bias[static_cast<std::size_t>(i)];
  }
  return {zk::CubeFace(*n, coords, vals), b};
}

std::string coords_1based(const std::vector<int>& coords) {
  std::string s;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(coords[i] + 1);
  }
  return s;
}

json kernel_json(const zk::Kernel& K) {
  json rows = json::array();
  for (Eigen::Index h = 0; h < K.matrix().rows(); ++h) {
    json row = json::array();
    for (Eigen::Index v = 0; v < K.matrix().cols(); ++v) row.push_back(K.matrix()(h, v));
    rows.push_back(std::move(row));
  }
  return {{"m", K.m()}, {"n", K.n()}, {"rows", rows}};
}

void emit_kernel(const Sink& sink, const std::string& stem, const zk::Kernel& K, const std::string& format) {
  if (format == "svg") {
    sink.put(stem + ".svg", zk::io::kernel_to_svg(K));
    return;
  }
  if (format == "json") {
    sink.put(stem + ".json", json_text(kernel_json(K)));
  } else {
    sink.put(stem + ".csv", zk::io::kernel_to_csv(K));
  }
  if (!sink.to_stdout()) sink.put(stem + ".svg", zk::io::kernel_to_svg(K));
}

// The 16 kernels of n-bit uniform-on-face shift constructions, one per set
// of free coordinates, ordered by face dimension.
void emit_face_sheet(const Sink& sink, int n, double alpha, const std::string& format) {
  zk::require_units(2 * n, "face sheet");
  std::vector<zk::StateIndex> free_masks;
  for (zk::StateIndex mask = 0; mask < zk::state_count(n); ++mask) free_masks.push_back(mask);
  std::stable_sort(free_masks.begin(), free_masks.end(),
                   [](auto a, auto b) { return __builtin_popcount(a) < __builtin_popcount(b); });

  const zk::StateIndex all = static_cast<zk::StateIndex>(zk::state_count(n) - 1);
  std::string index = "file,free_coords,dimension,sup_error,error_bound\n";
  std::ostringstream sheet;
  const int cell = 6;
  const int side = static_cast<int>(zk::state_count(n)) * cell;
  const int cols = 4;
  const int gap = 2 * cell;
  const int rows = (static_cast<int>(free_masks.size()) + cols - 1) / cols;
  sheet << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * side + (cols - 1) * gap << "\" height=\""
        << rows * side + (rows - 1) * gap << "\">\n";

  char name[32];
  for (std::size_t i = 0; i < free_masks.size(); ++i) {
    const zk::CubeFace face = zk::CubeFace::from_masks(n, all & ~free_masks[i], 0);
    const zk::NaturalParams zero = zk::NaturalParams::Zero(n);
    const zk::Kernel K = zk::zonoset_kernel(zk::face_uniform_params(face, zero, alpha));
    const zk::Kernel target = zk::face_shift_kernel(face, zero);
    const double err = (K.matrix() - target.matrix()).cwiseAbs().maxCoeff();
    std::snprintf(name, sizeof name, "face_%02zu", i);
    emit_kernel(sink, name, K, format);
    index += std::string(name) + "," + coords_1based(face.free_coords()) + "," + std::to_string(face.dimension()) + "," +
             format_double(err) + "," + format_double(zk::face_uniform_error_bound(face, alpha)) + "\n";

    std::string svg = zk::io::kernel_to_svg(K, cell);
    const int x = static_cast<int>(i % cols) * (side + gap);
    const int y = static_cast<int>(i / cols) * (side + gap);
    svg.replace(0, 4, "<svg x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\"");
    sheet << svg;
  }
  sheet << "</svg>\n";
  sink.put("index.csv", index);
  if (!sink.to_stdout()) sink.put("sheet.svg", sheet.str());
}

struct KernelArgs {
  std::string face;
  bool random = false;
  bool uniform_faces = false;
  int m = 2;
  int n = 2;
  double scale = 1.0;
  std::string params_file;
};

int cmd_kernel(const Globals& g, const KernelArgs& a, const json& cfg) {
  const int modes = (a.face.empty() ? 0 : 1) + (a.random ? 1 : 0) + (a.uniform_faces ? 1 : 0) +
                    (cfg.contains("params") || !a.params_file.empty() ? 1 : 0);
  if (modes != 1) throw UsageError("kernel: choose exactly one of --face, --random, --uniform-faces, --params");

  if (a.uniform_faces) {
    emit_face_sheet(Sink(g.out.empty() ? "." : g.out), a.n, g.alpha, g.format);
    return kExitPass;
  }
  zk::ZonosetParams params;
  if (!a.face.empty()) {
    const FaceSpec f = parse_face(a.face);
    params = zk::face_uniform_params(f.face, f.bias, g.alpha);
  } else if (a.random) {
    zk::require_units(a.m + a.n, "kernel");
    auto rng = zk::make_rng(g.seed);
    params = zk::ZonosetParams::random(a.m, a.n, rng, a.scale);
  } else {
    const json pj = a.params_file.empty() ? cfg.at("params") : json::parse(zk::io::read_file(a.params_file));
    params = zk::io::zonoset_from_json(pj);
  }
  zk::require_units(params.m() + params.n(), "kernel");
  emit_kernel(Sink(g.out), "kernel", zk::zonoset_kernel(params), g.format);
  return kExitPass;
}

int cmd_verify(const Globals& g, const std::string& id) {
  if (!zk::suites::has_suite(id)) {
    std::string known;
    for (const auto& s : zk::suites::suite_ids()) known += " " + s;
    throw UsageError("verify: unknown id '" + id + "' (known:" + known + ")");
  }
  zk::suites::Options opts;
  opts.seed = g.seed;
  opts.alpha = g.alpha;
  opts.omega = g.omega;
  opts.tol = g.tol;
  const auto report = zk::suites::run(id, opts);
  const std::string text = json_text(zk::suites::to_json(report));
  std::cout << text;
  if (!g.out.empty()) Sink(g.out).put("verify_" + id + ".json", text);
  return report.pass ? kExitPass : kExitFail;
}

int cmd_bounds(const Globals& g, int n, const std::vector<int>& ls) {
  if (n < 1) throw UsageError("bounds: n must be positive");
  if (ls.empty()) throw UsageError("bounds: give at least one depth with --l");
  json rows = json::array();
  std::string csv = "n,l,k,K,K_unclamped,max_bits,max_nats,expected_nats,log2_2llog2l";
  if (g.mc) csv += ",mc_mean,mc_se,mc_z";
  csv += "\n";

  for (int l : ls) {
    if (l < 1) throw UsageError("bounds: depths must be positive");
    const auto b = zk::dbn_error_bounds(n, l);
    json row;
    if (!b) {
      row = {{"n", n}, {"l", l}, {"bound", nullptr}};
      csv += std::to_string(n) + "," + std::to_string(l) + ",,,,,,,";
      if (g.mc) csv += ",,,";
      csv += "\n";
      rows.push_back(row);
      continue;
    }
    row = zk::io::bound_to_json(*b);
    row["log2_2llog2l"] = b->log2_2llog2l;
    csv += std::to_string(n) + "," + std::to_string(l) + "," + std::to_string(b->k) + "," + std::to_string(b->K) + "," +
           std::to_string(b->K_raw) + "," + format_double(b->max_bits) + "," + format_double(b->max_nats) + "," +
           format_double(b->expected_nats) + "," + format_double(b->log2_2llog2l);
    if (g.mc) {
      std::vector<int> lambda;
      for (int i = 0; i < b->K; ++i) lambda.push_back(i);
      const auto est = zk::monte_carlo_expected_kl(zk::Partition::cylinder(n, lambda),
                                                    zk::DirichletParams::symmetric(n, 1.0), g.mc, g.seed);
      const double z = est.se > 0 ? (est.mean - b->expected_nats) / est.se : 0.0;
      row["mc"] = {{"samples", g.mc}, {"mean", est.mean}, {"se", est.se}, {"z", z}};
      csv += "," + format_double(est.mean) + "," + format_double(est.se) + "," + format_double(z);
    }
    csv += "\n";
    rows.push_back(row);
  }

  const Sink sink(g.out);
  if (g.format == "json") {
    const json doc = {{"n", n},
                      {"min_layers_universal", zk::min_layers_universal(n)},
                      {"min_layers_universal_alt", zk::min_layers_universal_alt(n)},
                      {"rows", rows}};
    sink.put("bounds.json", json_text(doc));
  } else if (g.format == "csv") {
    sink.put("bounds.csv", csv);
  } else {
    throw UsageError("bounds: --format must be csv or json");
  }
  return kExitPass;
}

std::string prob_header() {
  std::string h;
  for (zk::StateIndex x = 0; x < 4; ++x) h += ",p_" + zk::BitState(2, x).str();
  return h;
}

// Rows of ten random (2,2) zonoset kernels with each row's pair of means.
int fig_zonosets(const Globals& g, const Sink& sink) {
  std::string csv = "tuple,h" + prob_header() + ",mean_1,mean_2\n";
  json tuples = json::array();
  for (int t = 0; t < 10; ++t) {
    auto rng = zk::make_rng(zk::derive_seed(g.seed, static_cast<std::uint64_t>(t)));
    const auto params = zk::ZonosetParams::random(2, 2, rng, 2.0);
    const zk::Kernel K = zk::zonoset_kernel(params);
    json pts = json::array();
    for (zk::StateIndex h = 0; h < 4; ++h) {
      const zk::Dist row = K.row(h);
      const auto mu = zk::marginals(row);
      csv += std::to_string(t) + "," + zk::BitState(2, h).str();
      for (double p : row.probs()) csv += "," + format_double(p);
      csv += "," + format_double(mu[0]) + "," + format_double(mu[1]) + "\n";
      pts.push_back({{"h", zk::BitState(2, h).str()}, {"probs", row.probs()}, {"means", {mu[0], mu[1]}}});
    }
    tuples.push_back({{"params", zk::io::zonoset_to_json(params)}, {"points", pts}});
  }
  if (g.format == "json") {
    sink.put("f2-zonosets.json", json_text(tuples));
  } else {
    sink.put("f2-zonosets.csv", csv);
  }
  return kExitPass;
}

// u * K_{1,2} over a grid of W (1x2) and B: the average of the kernel's two rows.
int fig_uK(const Globals& g, const Sink& sink) {
  const std::vector<double> wgrid{-80, -20, -6, -2, 0, 2, 6, 20, 80};
  const std::vector<double> bgrid{-40, -10, -3, -1, 0, 1, 3, 10, 40};
  std::string csv = "w_1,w_2,b_1,b_2" + prob_header() + "\n";
  json pts = json::array();
  for (double w1 : wgrid)
    for (double w2 : wgrid)
      for (double b1 : bgrid)
        for (double b2 : bgrid) {
          Eigen::MatrixXd W(1, 2);
          W << w1, w2;
          Eigen::VectorXd B(2);
          B << b1, b2;
          const zk::Kernel K = zk::zonoset_kernel(zk::ZonosetParams(W, B));
          const Eigen::RowVectorXd u = 0.5 * (K.matrix().row(0) + K.matrix().row(1));
          csv += format_double(w1) + "," + format_double(w2) + "," + format_double(b1) + "," + format_double(b2);
          for (Eigen::Index x = 0; x < 4; ++x) csv += "," + format_double(u[x]);
          csv += "\n";
          if (g.format == "json") {
            pts.push_back({{"W", {w1, w2}}, {"B", {b1, b2}}, {"probs", {u[0], u[1], u[2], u[3]}}});
          }
        }
  if (g.format == "json") {
    sink.put("f3-uK.json", json_text(pts));
  } else {
    sink.put("f3-uK.csv", csv);
  }
  return kExitPass;
}

int cmd_figures(const Globals& g, const std::string& which) {
  if (which == "f4-kernels") {
    emit_face_sheet(Sink(g.out.empty() ? "." : g.out), 4, g.alpha, g.format);
    return kExitPass;
  }
  if (g.format == "svg") throw UsageError("figures: " + which + " has no svg output");
  const Sink sink(g.out);
  if (which == "f2-zonosets") return fig_zonosets(g, sink);
  if (which == "f3-uK") return fig_uK(g, sink);
  throw UsageError("figures: unknown figure '" + which + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zk: zonoset kernels, DBN constructions and their error bounds"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(
      "Environment:\n  ZK_MAX_UNITS  raise the cap on total binary units for exact enumeration (default 24).\n"
      "                Memory and time grow as 2^units.\n\n"
      "Exit codes: 0 success or pass, 1 verification failure, 2 usage or configuration error.");

  Globals g;
  app.add_option("--seed", g.seed, "Root seed for every random draw")->capture_default_str();
  app.add_option("--alpha", g.alpha, "Sharpness of face and partition constructions")->capture_default_str();
  app.add_option("--omega", g.omega, "Sharpness of probability-sharing constructions")->capture_default_str();
  app.add_option("--tol", g.tol, "Override a suite's pass tolerance (negative keeps the default)")->capture_default_str();
  app.add_option("--out", g.out, "Write files into DIR instead of standard output");
  app.add_option("--mc", g.mc, "Monte Carlo samples for the bounds check column (0 disables)")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json", "svg"}))->capture_default_str();
  app.add_option("--config", g.config, "JSON file of option values; command-line flags take precedence")
      ->check(CLI::ExistingFile);

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "Write a zonoset kernel matrix and its heatmap");
  kernel->add_option("--face", ka.face, "Uniform-on-face kernel, e.g. \"n=3,I=1,val=1\" (1-based coordinates)");
  kernel->add_flag("--random", ka.random, "Standard normal parameters scaled by --scale");
  kernel->add_flag("--uniform-faces", ka.uniform_faces, "All 2^n face kernels of the n-cube with an index file");
  kernel->add_option("--params", ka.params_file, "JSON file with W (m x n) and B (n)")->check(CLI::ExistingFile);
  kernel->add_option("--m", ka.m, "Hidden units for --random")->capture_default_str();
  kernel->add_option("--n", ka.n, "Visible units for --random and --uniform-faces")->capture_default_str();
  kernel->add_option("--scale", ka.scale, "Scale of random parameters")->capture_default_str();

  std::string verify_id;
  auto* verify = app.add_subcommand("verify", "Run a seeded verification suite and print a JSON report");
  verify->add_option("id", verify_id, "Suite id: 1, 3, 4, 5.1, 5.3, 5.4, 6, 9, 10 or 11")->required();

  int bounds_n = 0;
  std::vector<int> bounds_l;
  auto* bounds = app.add_subcommand("bounds", "Tabulate DBN approximation error bounds");
  bounds->add_option("--n", bounds_n, "Layer width");
  bounds->add_option("--l", bounds_l, "Hidden-layer counts, comma separated")->delimiter(',');

  std::string which;
  auto* figures = app.add_subcommand("figures", "Emit figure data");
  figures->add_option("which", which, "f2-zonosets, f3-uK or f4-kernels")
      ->required()
      ->check(CLI::IsMember({"f2-zonosets", "f3-uK", "f4-kernels"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    json cfg = json::object();
    if (!g.config.empty()) {
      try {
        cfg = json::parse(zk::io::read_file(g.config));
      } catch (const json::parse_error& e) {
        throw UsageError(std::string("config: ") + e.what());
      }
    }
    if (kernel->parsed()) {
      apply_config(cfg, {kernel, &app}, {"params"});
      return cmd_kernel(g, ka, cfg);
    }
    if (verify->parsed()) {
      apply_config(cfg, {verify, &app}, {});
      return cmd_verify(g, verify_id);
    }
    if (bounds->parsed()) {
      apply_config(cfg, {bounds, &app}, {});
      return cmd_bounds(g, bounds_n, bounds_l);
    }
    apply_config(cfg, {figures, &app}, {});
    return cmd_figures(g, which);
  } catch (const std::exception& e) {
    std::cerr << "zk: " << e.what() << "\n";
    return kExitUsage;
  }
}
