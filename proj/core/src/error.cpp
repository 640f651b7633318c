#include "croprl/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace croprl {

double require_finite(double value, const std::string& what) {
  if (!std::isfinite(value)) {
    throw NumericError(fmt::format("non-finite value for {}: {}", what, value));
  }
  return value;
}

}  // namespace croprl
