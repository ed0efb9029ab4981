#pragma once

#include <stdexcept>
#include <string>

namespace kljn {

/// Raised when an input violates a documented precondition (bad cable
/// parameters, out-of-band frequencies, inconsistent simulation settings).
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a numeric procedure cannot deliver a trustworthy result
/// (quadrature that fails to converge, unstable integration, degenerate
/// phase measurements).  Never used to paper over a result that merely
/// looks surprising.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace kljn
