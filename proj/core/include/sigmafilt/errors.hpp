#pragma once

#include <stdexcept>
#include <string>

namespace sigmafilt {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical-domain violation: non-SPD covariance, non-finite value,
/// invalid dilation rate, NaN sampling coordinate.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Covariance family does not match the data (wrong parameter count,
/// off-diagonal entries for a diagonal family, ...).
class FamilyError : public Error {
public:
    using Error::Error;
};

/// Dimension or size mismatch between grids, images, or fields.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Text or file format could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace sigmafilt
