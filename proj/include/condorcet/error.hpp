#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace condorcet {

// Base class for all library errors. The CLI maps ValidationError subclasses
// to exit code 2 and ComputationError subclasses to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ComputationError : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NormalizationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A culture or polynomial has a zero coefficient. `subset` is the offending
// adversary bitmask when one is known.
class NonGenericCulture : public ValidationError {
 public:
  NonGenericCulture(const std::string& what, unsigned long long subset = 0)
      : ValidationError(what), subset_(subset) {}
  unsigned long long subset() const { return subset_; }

 private:
  unsigned long long subset_;
};

class SolverFailure : public ComputationError {
 public:
  SolverFailure(const std::string& what, std::vector<double> last_iterate)
      : ComputationError(what), last_(std::move(last_iterate)) {}
  const std::vector<double>& last_iterate() const { return last_; }

 private:
  std::vector<double> last_;
};

class UnsupportedConfiguration : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class ResourceError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

}  // namespace condorcet
