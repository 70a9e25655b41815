#pragma once

#include <stdexcept>
#include <string>

namespace frostman {

// Bad parameters or malformed input (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested scale is finer than the discretization supports (CLI exit code 3).
struct ResolutionError : std::runtime_error {
  explicit ResolutionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace frostman
