#pragma once

#include <stdexcept>
#include <string>

namespace hubofact {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An assignment does not cover every variable of the polynomial it is
/// evaluated against.
class AssignmentTooShort : public Error {
 public:
  using Error::Error;
};

/// Layout parameters are inconsistent (e.g. fixed LSB with fewer than 2 bits,
/// or a plain-model builder given nonzero block offsets).
class InvalidLayout : public Error {
 public:
  using Error::Error;
};

/// Fixed-LSB encoding requested for an even number; both factors of an odd
/// product must be odd.
class NotOddCapable : public Error {
 public:
  using Error::Error;
};

class WrongArity : public Error {
 public:
  using Error::Error;
};

class ZeroCoefficient : public Error {
 public:
  using Error::Error;
};

class NonPositiveCoefficient : public Error {
 public:
  using Error::Error;
};

/// Quadratization input has a term of degree above 4.
class UnsupportedDegree : public Error {
 public:
  using Error::Error;
};

class NegativeQuarticCoefficient : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration refused: variable count exceeds the configured cap.
class TooManyVariables : public Error {
 public:
  using Error::Error;
};

class EmptyPolynomial : public Error {
 public:
  using Error::Error;
};

class NoBlocksInPlan : public Error {
 public:
  using Error::Error;
};

/// A block plan would materialize more blocks than the configured cap.
class PlanTooLarge : public Error {
 public:
  using Error::Error;
};

/// A bit-refinement stage had more tied minimizers than the branch budget.
class StageMinimumAmbiguous : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

class ParseFailure : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace hubofact
