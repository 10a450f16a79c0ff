#pragma once

#include <stdexcept>
#include <string>

namespace flexkit {

class FlexError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public FlexError {
public:
  using FlexError::FlexError;
};

class UnknownLabel : public FlexError {
public:
  using FlexError::FlexError;
};

class EqualityExclusion : public FlexError {
public:
  using FlexError::FlexError;
};

class SingularElimination : public FlexError {
public:
  using FlexError::FlexError;
};

class NonCompactComposite : public FlexError {
public:
  using FlexError::FlexError;
};

class InfeasibleNominal : public FlexError {
public:
  using FlexError::FlexError;
};

class NoInteriorPoint : public FlexError {
public:
  using FlexError::FlexError;
};

class ImpracticalTruncation : public FlexError {
public:
  using FlexError::FlexError;
};

class NumericalBreakdown : public FlexError {
public:
  using FlexError::FlexError;
};

// A model-level subproblem had no feasible point.
class InfeasibleModel : public FlexError {
public:
  using FlexError::FlexError;
};

// A model-level subproblem was unbounded; the message names a ray.
class UnboundedModel : public FlexError {
public:
  using FlexError::FlexError;
};

// Malformed input files or invalid configuration.
class InputError : public FlexError {
public:
  using FlexError::FlexError;
};

}  // namespace flexkit
