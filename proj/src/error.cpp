#include "beliefkit/error.hpp"

#include <cstdio>

namespace beliefkit {

std::string_view error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownElement: return "UnknownElement";
        case ErrorCode::FrameMismatch: return "FrameMismatch";
        case ErrorCode::FrameTooLarge: return "FrameTooLarge";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ConditioningOnNull: return "ConditioningOnNull";
        case ErrorCode::ConditioningUndefined: return "ConditioningUndefined";
        case ErrorCode::TotalConflict: return "TotalConflict";
        case ErrorCode::NoFeasibleSelection: return "NoFeasibleSelection";
        case ErrorCode::WeightNormalization: return "WeightNormalization";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::DegenerateComplement: return "DegenerateComplement";
        case ErrorCode::NotOnRankGrid: return "NotOnRankGrid";
        case ErrorCode::ZeroPossibility: return "ZeroPossibility";
        case ErrorCode::RankOverflow: return "RankOverflow";
        case ErrorCode::KindMismatch: return "KindMismatch";
        case ErrorCode::UnknownRule: return "UnknownRule";
        case ErrorCode::GeneratorConstraintUnsatisfiable: return "GeneratorConstraintUnsatisfiable";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

std::string format_decimal(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

ErrorCategory error_category(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConditioningOnNull:
        case ErrorCode::ConditioningUndefined:
        case ErrorCode::TotalConflict:
        case ErrorCode::NoFeasibleSelection:
        case ErrorCode::DegenerateComplement:
        case ErrorCode::EmptySet:
        case ErrorCode::RankOverflow:
            return ErrorCategory::RuleUndefined;
        case ErrorCode::IoError:
            return ErrorCategory::Io;
        case ErrorCode::UnknownRule:
        case ErrorCode::InvalidArgument:
            return ErrorCategory::Usage;
        default:
            return ErrorCategory::Validation;
    }
}

}  // namespace beliefkit
