#pragma once

#include <stdexcept>
#include <string>

namespace mtm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed call: length mismatch, unsupported option, out-of-window parameter.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Invalid grid or solver configuration.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Parameter outside the soliton family, e.g. |omega| >= 1.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameter at a point where the requested quantity is singular (omega -> 0).
class DegenerateParameterError : public Error {
public:
    using Error::Error;
};

/// Failure inside a numerical kernel (eigensolver, imaginary residue check).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Operator assembly produced a matrix that is not symmetric to tolerance.
class ConstructionError : public Error {
public:
    using Error::Error;
};

class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class PoleEncounterError : public Error {
public:
    PoleEncounterError(const std::string& what, double position) : Error(what), position_(position) {}
    double position() const noexcept { return position_; }

private:
    double position_;
};

}  // namespace mtm
