#pragma once

#include <stdexcept>
#include <string>

namespace ganlab {

/// Raised when a computation produces a non-finite value or leaves its valid
/// numerical regime (NaN gradients, diverging objectives, zero densities).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ganlab
