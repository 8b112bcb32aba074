#pragma once

#include <stdexcept>
#include <string>

namespace semhier {

// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File missing or unreadable.
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed input file (bad JSON/CSV, wrong field types).
class ParseError : public Error {
public:
    using Error::Error;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class UnknownConceptError : public Error {
public:
    using Error::Error;
};

// SMO did not reach the KKT tolerance within its iteration budget.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace semhier
