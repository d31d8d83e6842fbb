#pragma once

#include <stdexcept>
#include <string>

namespace dmlwb {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A referenced column or role is missing from the data.
class SchemaError : public Error {
public:
    using Error::Error;
};

// A cell could not be parsed as a number.
class ParseError : public Error {
public:
    using Error::Error;
};

// Data violates a structural constraint (e.g. non-binary indicator).
class ValidationError : public Error {
public:
    using Error::Error;
};

// An argument is outside its admissible range (fold counts, kernel orders, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Parameters fall outside the domain of a closed-form expression.
class DomainError : public Error {
public:
    using Error::Error;
};

// A moment-condition denominator collapsed (non-identified fold or sample).
class DegeneracyError : public Error {
public:
    using Error::Error;
};

// A kernel-regression denominator vanished at an evaluation point.
class EmptyNeighborhoodError : public Error {
public:
    EmptyNeighborhoodError(const std::string& msg, double x0)
        : Error(msg), x_first(x0) {}
    double x_first;  // first coordinate of the offending evaluation point
};

// A replication failed while running in strict mode.
class StrictModeError : public Error {
public:
    using Error::Error;
};

}  // namespace dmlwb
