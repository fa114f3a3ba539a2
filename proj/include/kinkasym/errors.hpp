#pragma once

#include <stdexcept>
#include <string>

namespace kinkasym {

/// Index or parameter outside its legal range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Problem too large for the selected engine (e.g. dense limit).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Engine called outside the parameter regime it is exact for.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LAPACK / eigensolver / SVD failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An engine-level invariant was violated; indicates a bug, not bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A contraction would exceed its configured bond budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kinkasym
