#pragma once

#include <stdexcept>
#include <string>

namespace pbc {

// Invalid model/scheme/noise parameters or malformed experiment config.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A structural precondition on the map does not hold (no positive fixed
// point, no decreasing tail below the equilibrium, ...).
class AssumptionError : public std::runtime_error {
public:
  explicit AssumptionError(const std::string& what) : std::runtime_error(what) {}
};

// Hypotheses of a derived-constant computation fail and the caller did not
// ask to force the evaluation.
class HypothesisError : public std::runtime_error {
public:
  explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pbc
