#ifndef RELWALK_ERROR_HPP
#define RELWALK_ERROR_HPP

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relwalk {

enum class ErrorKind {
    // relation_core
    NonPositiveMass,
    MassSumMismatch,
    EmptyClass,
    NotEquivalent,
    InvalidPoint,
    InvalidGraphing,
    // walks
    IsolatedPoint,
    RowSumError,
    AsymmetricSupport,
    DetailedBalanceViolation,
    InvalidProbability,
    BaseMeasureMismatch,
    ProbSumError,
    AsymmetricGeneratorSet,
    InvalidPermutation,
    // spectral
    NotUnitary,
    CycleInconsistency,
    DimensionMismatch,
    MissingEdgeBlock,
    EigenFailure,
    DegenerateSpectrum,
    NoGap,
    // garland
    DuplicateTriangle,
    DegenerateTriangle,
    EmptyLink,
    DisconnectedLink,
    IsolatedVertex,
    SupportViolation,
    // ergodic
    EmptySet,
    DegenerateSet,
    ZeroField,
    // shared
    InvariantViolation,
    InvalidArgument,
    ParseError,
};

/// Whether an error stems from bad input (exit 2) or from the numerics (exit 3).
enum class ErrorCategory { validation, numerical };

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NonPositiveMass: return "NonPositiveMass";
    case ErrorKind::MassSumMismatch: return "MassSumMismatch";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::NotEquivalent: return "NotEquivalent";
    case ErrorKind::InvalidPoint: return "InvalidPoint";
    case ErrorKind::InvalidGraphing: return "InvalidGraphing";
    case ErrorKind::IsolatedPoint: return "IsolatedPoint";
    case ErrorKind::RowSumError: return "RowSumError";
    case ErrorKind::AsymmetricSupport: return "AsymmetricSupport";
    case ErrorKind::DetailedBalanceViolation: return "DetailedBalanceViolation";
    case ErrorKind::InvalidProbability: return "InvalidProbability";
    case ErrorKind::BaseMeasureMismatch: return "BaseMeasureMismatch";
    case ErrorKind::ProbSumError: return "ProbSumError";
    case ErrorKind::AsymmetricGeneratorSet: return "AsymmetricGeneratorSet";
    case ErrorKind::InvalidPermutation: return "InvalidPermutation";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::CycleInconsistency: return "CycleInconsistency";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MissingEdgeBlock: return "MissingEdgeBlock";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::NoGap: return "NoGap";
    case ErrorKind::DuplicateTriangle: return "DuplicateTriangle";
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::EmptyLink: return "EmptyLink";
    case ErrorKind::DisconnectedLink: return "DisconnectedLink";
    case ErrorKind::IsolatedVertex: return "IsolatedVertex";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::DegenerateSet: return "DegenerateSet";
    case ErrorKind::ZeroField: return "ZeroField";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

inline ErrorCategory category_of(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::EigenFailure:
    case ErrorKind::DegenerateSpectrum:
    case ErrorKind::NoGap:
    case ErrorKind::InvariantViolation:
        return ErrorCategory::numerical;
    default:
        return ErrorCategory::validation;
    }
}

/**
 * The single exception type thrown by the library. `kind()` identifies the
 * failure; `value()` carries a numeric payload where one is meaningful
 * (worst residual, offending index, ...), NaN otherwise.
 */
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, double value = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), value_(value)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    ErrorCategory category() const noexcept { return category_of(kind_); }
    double value() const noexcept { return value_; }

private:
    ErrorKind kind_;
    double value_;
};

}  // namespace relwalk

#endif
