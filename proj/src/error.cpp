#include "adipredict/error.hpp"

namespace adipredict {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidImage: return "InvalidImage";
    case ErrorCode::InvalidSpacing: return "InvalidSpacing";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::InconsistentScan: return "InconsistentScan";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidFoldCount: return "InvalidFoldCount";
    case ErrorCode::TooFewPairs: return "TooFewPairs";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::TrainingDiverged: return "TrainingDiverged";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::UnknownName: return "UnknownName";
    }
    return "Unknown";
}

} // namespace adipredict
