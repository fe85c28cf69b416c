#pragma once

#include <stdexcept>
#include <string>

namespace mtl {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different ambient spaces or have incompatible ranks.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Index constraints, malformed multi-indices, bad descriptor fields.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Geometric predicate could not be decided at the working tolerance.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// A valuation gave different densities on two flat polytopes that share the sampled patch.
class NotLocallyDefined : public Error {
 public:
  using Error::Error;
};

/// Least-squares design that cannot be solved reliably.
class IllConditioned : public Error {
 public:
  IllConditioned(const std::string& what, double condition)
      : Error(what + " (condition estimate " + std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

}  // namespace mtl
