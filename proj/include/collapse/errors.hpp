#pragma once

#include <stdexcept>
#include <string>

namespace collapse {

// Bad user input: model parameters, geometry, config files.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature did not reach the requested tolerance, or an integrand
// produced a NaN.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Covariance matrix failed the positive-semidefinite check beyond the
// roundoff allowance; signals an invalid correlator or quadrature failure.
struct PsdError : std::runtime_error {
  explicit PsdError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation outside the mathematical domain of an operation
// (e.g. chemical potential in the physical-region-pole regime).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace collapse
