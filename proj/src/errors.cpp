#include "zk/errors.hpp"

#include <cstdlib>
#include <string>

namespace zk {

int max_units() {
  static const int cap = [] {
    if (const char* env = std::getenv("ZK_MAX_UNITS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v > 0 && v <= 30) return static_cast<int>(v);
    }
    return kDefaultMaxUnits;
  }();
  return cap;
}

void require_units(int units, std::string_view what) {
  if (units < 0) throw std::invalid_argument(std::string(what) + ": negative unit count");
  if (units > max_units()) {
    throw CapacityError(std::string(what) + ": " + std::to_string(units) +
                        " units exceeds the exact-enumeration cap of " +
                        std::to_string(max_units()));
  }
}

}  // namespace zk
