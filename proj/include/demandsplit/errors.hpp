#pragma once

#include <stdexcept>

namespace demandsplit {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user-supplied data: unparseable CSV rows,
/// week gaps, duplicate weeks, empty input files.
class InputError : public Error {
public:
    using Error::Error;
};

/// Too few observations for the requested computation.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Data that makes the computation undefined rather than merely hard:
/// zero mean for a coefficient of variation, all values identical for a
/// histogram, uniform frequencies for practitioner thresholds.
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Invalid parameter passed by the caller (bad class count, bad window).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A violated internal invariant. Indicates a bug, not bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace demandsplit
