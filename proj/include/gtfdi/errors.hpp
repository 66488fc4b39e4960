#pragma once

#include <stdexcept>
#include <string>

namespace gtfdi {

/// Malformed or inconsistent configuration / input files.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario or campaign definitions that fail validation.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failures: non-finite intermediates, divergent solvers,
/// singular covariances.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gtfdi
