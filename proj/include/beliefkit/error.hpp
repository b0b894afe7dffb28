#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace beliefkit {

/// Tolerance applied to every "strictly positive" precondition and every
/// normalization check unless a caller supplies its own.
inline constexpr double kDefaultTolerance = 1e-9;

/// |deviation| > tol, with a few ulps of slack so a decimal input exactly tol away still passes.
inline bool beyond_tolerance(double deviation, double tol) {
    return std::abs(deviation) > tol + 8 * std::numeric_limits<double>::epsilon();
}

enum class ErrorCode {
    UnknownElement,
    FrameMismatch,
    FrameTooLarge,
    InvalidArgument,
    ValidationError,
    ParseError,
    ConditioningOnNull,
    ConditioningUndefined,
    TotalConflict,
    NoFeasibleSelection,
    WeightNormalization,
    EmptySet,
    DegenerateComplement,
    NotOnRankGrid,
    ZeroPossibility,
    RankOverflow,
    KindMismatch,
    UnknownRule,
    GeneratorConstraintUnsatisfiable,
    IoError,
};

/// Coarse grouping used for CLI exit codes.
enum class ErrorCategory {
    Validation,
    RuleUndefined,
    Io,
    Usage,
};

std::string_view error_name(ErrorCode code);
/// Shortest decimal form with at most 12 significant digits.
std::string format_decimal(double value);
ErrorCategory error_category(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const { return error_name(code_); }

private:
    ErrorCode code_;
};

/// A non-fatal condition attached to a result, e.g. a subnormal posterior.
struct Warning {
    std::string name;
    std::string message;

    bool operator==(const Warning&) const = default;
};

}  // namespace beliefkit
