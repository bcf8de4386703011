#pragma once

#include <stdexcept>
#include <string>

namespace weakflow {

// Status codes shared by the C API and the CLI exit codes:
// 0 success, 1 configuration error, 2 domain error, 3 numerical failure.
enum class Status : int {
    Ok = 0,
    ConfigError = 1,
    DomainError = 2,
    NumericError = 3,
};

class Error : public std::runtime_error {
public:
    Error(Status status, std::string kind, const std::string& message)
        : std::runtime_error(message), status_(status), kind_(std::move(kind)) {}

    Status status() const { return status_; }
    const std::string& kind() const { return kind_; }

private:
    Status status_;
    std::string kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg, std::string kind = "ConfigError")
        : Error(Status::ConfigError, std::move(kind), msg) {}
};

struct DimensionMismatchError : ConfigError {
    explicit DimensionMismatchError(const std::string& msg)
        : ConfigError(msg, "DimensionMismatch") {}
};

struct TailTruncationError : ConfigError {
    explicit TailTruncationError(const std::string& msg)
        : ConfigError(msg, "TailTruncation") {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg, std::string kind = "DomainError")
        : Error(Status::DomainError, std::move(kind), msg) {}
};

// Weak value undefined: |<f|i>| fell below the configured overlap floor.
struct OrthogonalSelectionError : DomainError {
    explicit OrthogonalSelectionError(const std::string& msg)
        : DomainError(msg, "OrthogonalSelection") {}
};

struct NullWeakValueError : DomainError {
    explicit NullWeakValueError(const std::string& msg)
        : DomainError(msg, "NullWeakValue") {}
};

struct PostselectionStarvedError : DomainError {
    explicit PostselectionStarvedError(const std::string& msg)
        : DomainError(msg, "PostselectionStarved") {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& msg, std::string kind = "NumericError")
        : Error(Status::NumericError, std::move(kind), msg) {}
};

struct DegeneratePhaseError : NumericError {
    explicit DegeneratePhaseError(const std::string& msg)
        : NumericError(msg, "DegeneratePhase") {}
};

}  // namespace weakflow
