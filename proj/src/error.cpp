#include "ensreg/error.hpp"

namespace ensreg {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MissingTargetColumn: return "MissingTargetColumn";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InvalidHyperparameter: return "InvalidHyperparameter";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ConstantTarget: return "ConstantTarget";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::SingularMisfitMatrix: return "SingularMisfitMatrix";
    case ErrorCode::EmptyStore: return "EmptyStore";
    case ErrorCode::UnknownMethod: return "UnknownMethod";
    case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace ensreg
