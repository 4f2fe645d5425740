#pragma once

#include <stdexcept>
#include <string>

namespace refract {

// Argument outside the mathematical domain of an operation (θ < 0, s ≤ Φ(q), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Model or weight definition that cannot be represented (confluent roots,
// ill-posed refraction, inconsistent tails).
class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The implicit trapezoid step cannot be solved on the requested grid.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fluctuation quantity is numerically degenerate (zero denominators,
// truncated domains too short, impossible events).
class DegenerateProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration or input document. `path` names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace refract
