#pragma once

#include <stdexcept>
#include <string>

namespace loadshare {

// Coarse failure categories. Each maps to one process exit code in the CLI:
//   io -> 1, validation -> 2, convergence -> 3, precondition -> 4.
enum class ErrorCategory { io = 1, validation = 2, convergence = 3, precondition = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string kind, const std::string& message)
        : std::runtime_error(message), category_(category), kind_(std::move(kind)) {}

    ErrorCategory category() const noexcept { return category_; }
    // Stable class name ("NoConvergence", "ParseError", ...) used in error events.
    const std::string& kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
    std::string kind_;
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorCategory::io, "IoError", msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(ErrorCategory::validation, "ParseError", msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg)
        : Error(ErrorCategory::validation, "ValidationError", msg) {}
    ValidationError(const std::string& kind, const std::string& msg)
        : Error(ErrorCategory::validation, kind, msg) {}
};

struct NonMonotoneData : ValidationError {
    explicit NonMonotoneData(const std::string& msg) : ValidationError("NonMonotoneData", msg) {}
};

struct SlopeOutOfRange : ValidationError {
    explicit SlopeOutOfRange(const std::string& msg) : ValidationError("SlopeOutOfRange", msg) {}
};

struct ContractionViolated : ValidationError {
    explicit ContractionViolated(const std::string& msg) : ValidationError("ContractionViolated", msg) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg)
        : Error(ErrorCategory::convergence, "NoConvergence", msg) {}
};

struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& msg)
        : Error(ErrorCategory::convergence, "QuadratureFailure", msg) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg)
        : Error(ErrorCategory::precondition, "DomainError", msg) {}
};

struct RangeError : Error {
    explicit RangeError(const std::string& msg)
        : Error(ErrorCategory::precondition, "RangeError", msg) {}
};

struct NonConvexObjective : Error {
    explicit NonConvexObjective(const std::string& msg)
        : Error(ErrorCategory::precondition, "NonConvexObjective", msg) {}
};

struct DegenerateRatio : Error {
    explicit DegenerateRatio(const std::string& msg)
        : Error(ErrorCategory::precondition, "DegenerateRatio", msg) {}
};

struct ForceOutOfDomain : Error {
    explicit ForceOutOfDomain(const std::string& msg)
        : Error(ErrorCategory::precondition, "ForceOutOfDomain", msg) {}
};

}
