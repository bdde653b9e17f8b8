#pragma once

#include <stdexcept>
#include <string>

namespace fejerlab {

/// Base class for every error thrown by this library. Catching this is
/// enough to map any domain failure onto a CLI exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two vectors (or a matrix and a vector) of incompatible dimensions.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A vector or matrix entry is NaN or infinite.
class NonFiniteValue : public Error {
public:
    using Error::Error;
};

/// A direction was requested from a vector whose norm is below the zero
/// threshold.
class ZeroVector : public Error {
public:
    using Error::Error;
};

/// A vector failed the unit-norm requirement.
class InvalidUnitVector : public Error {
public:
    using Error::Error;
};

/// Applying the truncated shift would push mass past the last stored
/// coordinate.
class TruncationOverflow : public Error {
public:
    using Error::Error;
};

/// A linear solve met a pivot too small to trust.
class SingularSystem : public Error {
public:
    using Error::Error;
};

/// An operator description failed its construction-time validation.
class InvalidOperator : public Error {
public:
    using Error::Error;
};

/// The requested diagnostic is not defined for this operator variant.
class UnsupportedOperator : public Error {
public:
    using Error::Error;
};

/// A set description failed its construction-time validation.
class InvalidSet : public Error {
public:
    using Error::Error;
};

/// Trace index outside the stored range.
class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

/// The candidate point does not keep its distance to the trace
/// nonincreasing within tolerance.
class NotAFejerPoint : public Error {
public:
    using Error::Error;
};

/// Every index of the trace was skipped as degenerate, so no direction
/// records could be produced.
class AllDegenerate : public Error {
public:
    using Error::Error;
};

/// A tail statistic was requested from an empty record list.
class EmptyTail : public Error {
public:
    using Error::Error;
};

/// The reference point lies outside the set by more than the active
/// tolerance.
class ZbarNotInSet : public Error {
public:
    using Error::Error;
};

/// The normal cone at the reference point is not a single ray.
class NotARay : public Error {
public:
    using Error::Error;
};

/// The rotation angle makes the averaged map degenerate (cosine zero).
class DegenerateTheta : public Error {
public:
    using Error::Error;
};

/// An experiment configuration is missing a field or holds an invalid
/// value; the message names the offending field.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace fejerlab
