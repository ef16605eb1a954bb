#pragma once

#include <stdexcept>
#include <string>

namespace phidiv {

/* All library errors derive from Error so callers can catch one type.
   Subclasses mark which contract was violated, not where it happened. */
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation outside a function's domain (support boundary, table range, bad spec).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Probability weight at or below the interior floor, or a computed mass collapsing to zero.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

// Weights that do not sum to one within tolerance.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

// Mismatched vector lengths.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Partition blocks referencing invalid indices, overlapping, or not covering.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Invalid chart base point or reference measure.
class ChartError : public Error {
 public:
  using Error::Error;
};

// Vector outside the chart's tangent space.
class TangentError : public Error {
 public:
  using Error::Error;
};

// Vanishing denominator in a derived quantity (e.g. zero second derivative).
class SingularError : public Error {
 public:
  using Error::Error;
};

}  // namespace phidiv
