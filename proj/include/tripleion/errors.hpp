#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tripleion {

/// Input outside the domain of a physical formula (singular configuration,
/// time outside the pulse, non-positive amplitude, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An iterative solver stopped without meeting its tolerance. Carries the
/// last iterate so callers can inspect or restart from it.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

private:
  std::vector<double> last_iterate_;
};

/// Malformed configuration or command line input.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace tripleion
