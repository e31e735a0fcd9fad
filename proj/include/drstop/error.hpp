#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drstop {

enum class ErrorCode {
    InvalidParameter,
    EmptyAmbiguitySet,
    InvalidDistribution,
    NegativeSupport,
    XiOutOfRange,
    InfeasibleSupportTriple,
    PreconditionViolated,
    NoFeasibleCandidate,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library surfaces as this exception; `code()` names the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::EmptyAmbiguitySet: return "EmptyAmbiguitySet";
        case ErrorCode::InvalidDistribution: return "InvalidDistribution";
        case ErrorCode::NegativeSupport: return "NegativeSupport";
        case ErrorCode::XiOutOfRange: return "XiOutOfRange";
        case ErrorCode::InfeasibleSupportTriple: return "InfeasibleSupportTriple";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::NoFeasibleCandidate: return "NoFeasibleCandidate";
    }
    return "Unknown";
}

}  // namespace drstop
