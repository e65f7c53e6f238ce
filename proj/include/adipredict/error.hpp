#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adipredict {

enum class ErrorCode {
    InvalidImage,
    InvalidSpacing,
    InvalidCount,
    InconsistentScan,
    ParseError,
    IoError,
    InvalidFoldCount,
    TooFewPairs,
    SingularDesign,
    InvalidK,
    InvalidConfig,
    TrainingDiverged,
    DimensionMismatch,
    NotInvertible,
    EmptyDataset,
    BudgetExceeded,
    UnknownName,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All failures raised by the library carry one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace adipredict
