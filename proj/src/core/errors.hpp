#ifndef QMHEAT_CORE_ERRORS_HPP
#define QMHEAT_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qmheat {

// Error taxonomy shared by all modules; the C API maps each type to a status code.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument violates an operation's contract (wrong case, bad buffer, null handle).
struct InvalidArgument : Error {
    using Error::Error;
};

// Value outside the mathematical domain of a function (negative frequency, non-positive energy).
struct DomainError : Error {
    using Error::Error;
};

// Model has no unique answer (vanishing denominator, multi-dimensional steady-state kernel).
struct DegenerateModel : Error {
    using Error::Error;
};

// Floating-point breakdown: non-finite values, residuals beyond tolerance.
struct NumericalError : Error {
    using Error::Error;
};

// A quantity did not settle within the requested horizon.
struct ConvergenceError : Error {
    using Error::Error;
};

// Bad scenario configuration (missing field, wrong type, malformed JSON).
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem failure while writing artifacts.
struct IoError : Error {
    using Error::Error;
};

} // namespace qmheat

#endif
