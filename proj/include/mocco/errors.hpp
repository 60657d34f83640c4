#pragma once

#include <stdexcept>
#include <string>

namespace mocco {

// Invalid configuration value (bad layer sizes, unknown env name, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension mismatch between tensors / vectors.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values where finite arithmetic is required.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation not available for the given object (e.g. 2-D surface dump on a
// 1-D action space).
struct UnsupportedError : std::runtime_error {
  explicit UnsupportedError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mocco
