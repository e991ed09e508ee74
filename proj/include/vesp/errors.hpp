#pragma once

#include <stdexcept>
#include <string>

namespace vesp {

// Malformed or inconsistent input data (files, schemas, alignment).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (non-finite values, factorization failure, singular
// innovation covariance).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration or infeasible geometry.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace vesp
