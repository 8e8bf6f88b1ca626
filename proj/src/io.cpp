#include "zk/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "zk/errors.hpp"

namespace zk::io {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) throw DimensionError("json: matrix row count");
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw DimensionError("json: matrix column count");
    for (Eigen::Index c = 0; c < cols; ++c) M(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return M;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("json: expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      row.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument("csv: malformed number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int log2_exact(std::size_t count, const char* what) {
  if (count == 0 || (count & (count - 1)) != 0) {
    throw DimensionError(std::string(what) + ": size " + std::to_string(count) + " is not a power of two");
  }
  return __builtin_ctzll(count);
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dist_to_csv(const Dist& p) {
  std::string out;
  for (double v : p.probs()) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

Dist dist_from_csv(const std::string& text) {
  std::vector<double> probs;
  for (const auto& row : parse_csv(text)) {
    if (row.size() != 1) throw std::invalid_argument("dist csv: expected one value per line");
    probs.push_back(row[0]);
  }
  const int n = log2_exact(probs.size(), "dist csv");
  return Dist(n, std::move(probs));
}

json dist_to_json(const Dist& p) { return {{"n", p.dim()}, {"probs", p.probs()}}; }

Dist dist_from_json(const json& j) {
  return Dist(j.at("n").get<int>(), j.at("probs").get<std::vector<double>>());
}

std::string kernel_to_csv(const Kernel& K) {
  std::string out;
  const auto& M = K.matrix();
  for (Eigen::Index h = 0; h < M.rows(); ++h) {
    for (Eigen::Index v = 0; v < M.cols(); ++v) {
      if (v) out += ',';
      out += format_double(M(h, v));
    }
    out += '\n';
  }
  return out;
}

Kernel kernel_from_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  const int m = log2_exact(rows.size(), "kernel csv");
  const int n = log2_exact(rows.front().size(), "kernel csv");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t h = 0; h < rows.size(); ++h) {
    if (rows[h].size() != rows.front().size()) throw DimensionError("kernel csv: ragged rows");
    for (std::size_t v = 0; v < rows[h].size(); ++v) M(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(v)) = rows[h][v];
  }
  return Kernel(m, n, std::move(M));
}

std::string kernel_to_svg(const Kernel& K, int cell) {
  const auto& M = K.matrix();
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << M.cols() * cell << "\" height=\"" << M.rows() * cell
      << "\" shape-rendering=\"crispEdges\">\n";
  for (Eigen::Index h = 0; h < M.rows(); ++h) {
    const double mx = M.row(h).maxCoeff();
    for (Eigen::Index v = 0; v < M.cols(); ++v) {
      const double level = mx > 0.0 ? M(h, v) / mx : 0.0;
      const int g = static_cast<int>(std::lround(255.0 * (1.0 - level)));
      out << "<rect x=\"" << v * cell << "\" y=\"" << h * cell << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"rgb(" << g << ',' << g << ',' << g << ")\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string kernel_to_pgm(const Kernel& K) {
  const auto& M = K.matrix();
  std::ostringstream out;
  out << "P2\n" << M.cols() << ' ' << M.rows() << "\n255\n";
  for (Eigen::Index h = 0; h < M.rows(); ++h) {
    const double mx = M.row(h).maxCoeff();
    for (Eigen::Index v = 0; v < M.cols(); ++v) {
      const double level = mx > 0.0 ? M(h, v) / mx : 0.0;
      out << (v ? " " : "") << std::lround(255.0 * (1.0 - level));
    }
    out << '\n';
  }
  return out.str();
}

json dbn_to_json(const DbnParams& p) {
  json weights = json::array();
  for (const auto& W : p.weights) weights.push_back(matrix_to_json(W));
  json biases = json::array();
  for (const auto& B : p.biases) biases.push_back(vector_to_json(B));
  return {{"widths", p.widths}, {"weights", weights}, {"biases", biases}};
}

DbnParams dbn_from_json(const json& j) {
  auto widths = j.at("widths").get<std::vector<int>>();
  if (widths.size() < 2) throw std::invalid_argument("dbn json: need at least two widths");
  const auto& jw = j.at("weights");
  const auto& jb = j.at("biases");
  if (!jw.is_array() || jw.size() + 1 != widths.size()) throw DimensionError("dbn json: weight count");
  std::vector<Eigen::MatrixXd> weights;
  for (std::size_t k = 1; k < widths.size(); ++k) weights.push_back(matrix_from_json(jw[k - 1], widths[k], widths[k - 1]));
  std::vector<Eigen::VectorXd> biases;
  for (const auto& b : jb) biases.push_back(vector_from_json(b));
  return DbnParams(std::move(widths), std::move(weights), std::move(biases));
}

json rbm_to_json(const RbmParams& p) {
  return {{"widths", {p.n(), p.m()}},
          {"weights", json::array({matrix_to_json(p.W)})},
          {"biases", json::array({vector_to_json(p.B), vector_to_json(p.C)})}};
}

RbmParams rbm_from_json(const json& j) {
  const DbnParams d = dbn_from_json(j);
  if (d.depth() != 1) throw std::invalid_argument("rbm json: expected exactly two widths");
  return top_rbm(d);
}

json zonoset_to_json(const ZonosetParams& p) { return {{"W", matrix_to_json(p.W)}, {"B", vector_to_json(p.B)}}; }

ZonosetParams zonoset_from_json(const json& j) {
  Eigen::VectorXd B = vector_from_json(j.at("B"));
  const auto& jw = j.at("W");
  if (!jw.is_array()) throw std::invalid_argument("zonoset json: W must be an array");
  Eigen::MatrixXd W = matrix_from_json(jw, static_cast<Eigen::Index>(jw.size()), B.size());
  return ZonosetParams(std::move(W), std::move(B));
}

json path_family_to_json(const PathFamily& f) {
  json paths = json::array();
  for (const auto& p : f.paths()) paths.push_back({{"states", p.states()}, {"transitions", p.transitions()}});
  return {{"n", f.dim()}, {"length", f.length()}, {"paths", paths}};
}

PathFamily path_family_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  std::vector<Path> paths;
  for (const auto& jp : j.at("paths")) {
    Path p(n, jp.at("states").get<std::vector<StateIndex>>());
    if (jp.contains("transitions") && jp.at("transitions").get<std::vector<int>>() != p.transitions()) {
      throw std::invalid_argument("path json: transitions disagree with states");
    }
    paths.push_back(std::move(p));
  }
  return PathFamily(n, std::move(paths));
}

json bound_to_json(const ErrorBound& b) {
  return {{"n", b.n},
          {"l", b.l},
          {"k", b.k},
          {"K", b.K},
          {"K_unclamped", b.K_raw},
          {"max_nats", b.max_nats},
          {"max_bits", b.max_bits},
          {"expected_nats", b.expected_nats},
          {"prior", "dirichlet-uniform"}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace zk::io
