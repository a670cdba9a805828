#pragma once

/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by every dualinv module.
 */

#include <stdexcept>
#include <string>

namespace dualinv {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Appreciable numerator over an infinitesimal (or zero) denominator.
class DivisionUndefined : public Error {
public:
    using Error::Error;
};

/// Reciprocal requested for a dual number with zero standard part.
class NotAppreciable : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

/// Square dual matrix whose standard part is rank deficient.
class SingularStandardPart : public Error {
public:
    using Error::Error;
};

/// The dual Moore-Penrose generalized inverse was requested for a
/// non-essential matrix.
class DmpgiNotExist : public Error {
public:
    using Error::Error;
};

/// Base SVD or eigensolver did not converge, or the input held NaN/Inf.
class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

/// Non-finite matrix entry.
class ValueError : public Error {
public:
    using Error::Error;
};

/// Input to the exact rational oracle that has no exact rational value.
class InexactInput : public Error {
public:
    using Error::Error;
};

class InvalidSpec : public Error {
public:
    using Error::Error;
};

}  // namespace dualinv
