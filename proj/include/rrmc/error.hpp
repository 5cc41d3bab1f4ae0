#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rrmc {

enum class ErrorCode {
    InvalidParams,
    InvalidDistribution,
    DimensionMismatch,
    ConstraintViolation,
    InvalidConfig,
    EmptyTrajectory,
    MixedProcessCount,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidParams: return "invalid-params";
    case ErrorCode::InvalidDistribution: return "invalid-distribution";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::ConstraintViolation: return "constraint-violation";
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::EmptyTrajectory: return "empty-trajectory";
    case ErrorCode::MixedProcessCount: return "mixed-m";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace rrmc
