#pragma once

#include <stdexcept>
#include <string>

namespace manpg {

/// Thrown when a numerical routine cannot meet its contract: rank
/// deficiency, iteration caps, singular systems, violated invariants.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace manpg
