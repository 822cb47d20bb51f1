#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace defectgeo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Stable identifier used in reports and on stderr (e.g. "SingularTriad").
    virtual const char* kind() const noexcept { return "Error"; }
};

#define DEFECTGEO_ERROR(Name)                                  \
    class Name : public Error {                                \
    public:                                                    \
        using Error::Error;                                    \
        const char* kind() const noexcept override { return #Name; } \
    }

DEFECTGEO_ERROR(DegreeOverflow);
DEFECTGEO_ERROR(DegreeMismatch);
DEFECTGEO_ERROR(FrameMismatch);
DEFECTGEO_ERROR(DerivativeDepthExceeded);
DEFECTGEO_ERROR(SingularTriad);
DEFECTGEO_ERROR(SingularGauge);
DEFECTGEO_ERROR(SingularDeformation);
DEFECTGEO_ERROR(NewtonFailure);
DEFECTGEO_ERROR(AnisotropyNotSupported);
DEFECTGEO_ERROR(InvalidMaterial);
DEFECTGEO_ERROR(InvalidArgument);

#undef DEFECTGEO_ERROR

/// Malformed expression text. `offset` is a byte offset into the input.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::string expected, const std::string& input);
    const char* kind() const noexcept override { return "ParseError"; }
    std::size_t offset() const noexcept { return offset_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

/// Division by zero, logarithm of a non-positive value and friends, raised
/// while evaluating an expression at a concrete point.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double x, double y, double z, double t);
    const char* kind() const noexcept override { return "EvaluationError"; }
    double x, y, z, t;
};

/// Invalid scenario file. `line` is 1-based; 0 when not tied to a line.
class ScenarioError : public Error {
public:
    ScenarioError(const std::string& what, std::size_t line);
    const char* kind() const noexcept override { return "ScenarioError"; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace defectgeo
