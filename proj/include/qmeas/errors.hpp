#pragma once

#include <stdexcept>
#include <string>

namespace qmeas {

/// Input that violates a documented precondition or type invariant
/// (wrong dimensions, unnormalized states, malformed configs).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical invariant broke during a computation that was given valid input
/// (closure that never stabilizes, positivity lost beyond tolerance, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qmeas
