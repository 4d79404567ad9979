#pragma once

#include <stdexcept>
#include <string>

namespace nlk {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exponent or dimension outside the admissible interval.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Degenerate or malformed input value (m = 1, bad grid, ...).
class ValueError : public Error {
public:
    using Error::Error;
};

/// A moment integral that does not converge.
class IntegralDivergence : public Error {
public:
    using Error::Error;
};

/// Evaluation point outside the domain of a formula (t <= 0, R <= 0).
class DomainError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Explicit substepping would need more substeps than allowed.
class CFLError : public Error {
public:
    using Error::Error;
};

class NonFiniteError : public Error {
public:
    using Error::Error;
};

class InversionError : public Error {
public:
    using Error::Error;
};

/// The shift of a shift-invert eigensolve hit the spectrum.
class SingularShift : public Error {
public:
    using Error::Error;
};

/// True for the errors that signal invalid user input rather than a failed computation.
inline bool is_validation_error(const std::exception& e)
{
    return dynamic_cast<const RangeError*>(&e) != nullptr || dynamic_cast<const ValueError*>(&e) != nullptr;
}

} // namespace nlk
