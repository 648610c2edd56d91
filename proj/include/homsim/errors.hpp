#pragma once
#include <stdexcept>
#include <string>

namespace homsim {

/// Violation of a physical or numerical precondition (bad parameter,
/// non-unitary matrix, under-resolved grid, ...).
struct ValidationError : std::invalid_argument {
  explicit ValidationError(const std::string &msg) : std::invalid_argument(msg) {}
};

/// Malformed or incomplete scenario configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Failure to read or write an output destination.
struct IoError : std::runtime_error {
  explicit IoError(const std::string &msg) : std::runtime_error(msg) {}
};

}  // namespace homsim
