#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dicke {

enum class ErrorCode {
    InvalidArgument,
    NonSymmetric,
    NonPositiveDefinite,
    NearSingular,
    NumericalFailure,
    NotThreeMode,
    PatternFailure,
    NonPhysical,
    NotPure,
    UnknownMode,
    GoldstoneLine,
    BudgetExceeded,
    ConfigInvalid,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::NotThreeMode: return "NotThreeMode";
    case ErrorCode::PatternFailure: return "PatternFailure";
    case ErrorCode::NonPhysical: return "NonPhysical";
    case ErrorCode::NotPure: return "NotPure";
    case ErrorCode::UnknownMode: return "UnknownMode";
    case ErrorCode::GoldstoneLine: return "GoldstoneLine";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace dicke
