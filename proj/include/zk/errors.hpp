#pragma once

#include <stdexcept>
#include <string_view>

namespace zk {

/// Raised when an exact enumeration would exceed the unit budget.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Raised when operands live on state spaces of different dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kDefaultMaxUnits = 24;

/// Upper bound on the number of binary units enumerated jointly.
/// Defaults to 24; the ZK_MAX_UNITS environment variable overrides it.
int max_units();

/// Throws CapacityError when `units` exceeds max_units().
void require_units(int units, std::string_view what);

}  // namespace zk
