#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace curvesearch {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (dimension, sign, finiteness).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An operation needs an analytic oracle the objective does not provide.
class UnsupportedOracle : public Error {
 public:
  using Error::Error;
};

// Numerical routine failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration failed validation. Carries every problem found,
// each prefixed with the JSON path of the offending field.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace curvesearch
