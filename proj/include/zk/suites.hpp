#pragma once

// Seeded numerical verification runs behind `zk verify`.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace zk::suites {

struct Options {
  std::uint64_t seed = 1;
  double alpha = 40.0;      // sharpness of face and partition rows
  double omega = 30.0;      // sharpness of sharing constructions
  double tol = -1.0;        // negative: use the suite's own tolerance
};

struct Report {
  std::string prop;
  int trials = 0;
  int failures = 0;
  double worst_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

const std::vector<std::string>& suite_ids();
bool has_suite(const std::string& id);
Report run(const std::string& id, const Options& options = {});

nlohmann::json to_json(const Report& r);

}  // namespace zk::suites
