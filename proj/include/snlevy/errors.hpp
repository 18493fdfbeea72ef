#pragma once

#include <stdexcept>
#include <string>

namespace snlevy {

// Base class for all numeric failures raised by this library.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive quadrature failed to reach the requested tolerance.
class QuadratureError : public NumericError {
public:
    QuadratureError(const std::string& what, double achieved_tol)
        : NumericError(what + " (achieved tolerance " + std::to_string(achieved_tol) + ")"),
          achieved_tolerance(achieved_tol) {}
    double achieved_tolerance;
};

// Bracketed root search failed (bracket expansion or iteration limit).
class RootFindError : public NumericError {
public:
    explicit RootFindError(const std::string& what) : NumericError(what) {}
};

// Laplace inversion produced values inconsistent with a scale function.
class InversionError : public NumericError {
public:
    explicit InversionError(const std::string& what) : NumericError(what) {}
};

// Input outside the mathematical domain of an operation.
class DomainError : public NumericError {
public:
    explicit DomainError(const std::string& what) : NumericError(what) {}
};

// Evaluation outside the tabulated range of a grid object.
class RangeError : public NumericError {
public:
    explicit RangeError(const std::string& what) : NumericError(what) {}
};

// A documented precondition of an operation does not hold.
class PreconditionError : public NumericError {
public:
    explicit PreconditionError(const std::string& what) : NumericError(what) {}
};

// Model / run configuration could not be parsed or validated.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Re-throw helper used by pipeline code to tag the failing stage.
class StageError : public NumericError {
public:
    StageError(const std::string& stage, const std::string& what)
        : NumericError("[stage " + stage + "] " + what), stage_name(stage) {}
    std::string stage_name;
};

} // namespace snlevy
