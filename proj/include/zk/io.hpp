#pragma once

// Text formats: CSV for vectors and matrices, JSON for parameters and
// reports, SVG/PGM for kernel heatmaps. Numbers are written with 17
// significant digits so files round-trip exactly.

#include <string>

#include <json.hpp>

#include "zk/distributions.hpp"
#include "zk/divergence.hpp"
#include "zk/hypercube.hpp"
#include "zk/kernels.hpp"
#include "zk/models.hpp"

namespace zk::io {

std::string format_double(double x);

/// One probability per line in state-index order.
std::string dist_to_csv(const Dist& p);
Dist dist_from_csv(const std::string& text);

nlohmann::json dist_to_json(const Dist& p);
Dist dist_from_json(const nlohmann::json& j);

/// 2^m lines of 2^n comma-separated entries.
std::string kernel_to_csv(const Kernel& K);
Kernel kernel_from_csv(const std::string& text);

/// Grayscale heatmap, each row scaled to its own maximum (black = max).
std::string kernel_to_svg(const Kernel& K, int cell = 12);
std::string kernel_to_pgm(const Kernel& K);

nlohmann::json dbn_to_json(const DbnParams& p);
DbnParams dbn_from_json(const nlohmann::json& j);

/// RBM as a one-hidden-layer stack: widths [n, m], biases [B, C].
nlohmann::json rbm_to_json(const RbmParams& p);
RbmParams rbm_from_json(const nlohmann::json& j);

nlohmann::json zonoset_to_json(const ZonosetParams& p);
ZonosetParams zonoset_from_json(const nlohmann::json& j);

nlohmann::json path_family_to_json(const PathFamily& f);
PathFamily path_family_from_json(const nlohmann::json& j);

nlohmann::json bound_to_json(const ErrorBound& b);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace zk::io
