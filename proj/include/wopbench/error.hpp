#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wopbench {

enum class ErrorCode {
    MismatchedBaseOrder,
    WidthMismatch,
    CoefficientOutOfRange,
    InvalidElement,
    InvalidTerm,
    InfinityArithmetic,
    ParseError,
    ColorOutOfRange,
    NotAPartialOrder,
    UnknownTag,
    ParamsOutOfRange,
    CertificateMismatch,
    LengthOverflow,
    NotDescending,
    EvenColor,
    NotHomogeneous,
    EmptyList,
    NotRightOrdered,
    NonUnitFraction,
    NotIncreasing,
    StageBudgetExceeded,
    MalformedValue,
    ExponentOverflow,
    UnknownCandidate,
    UnknownReduction,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code so
/// that harness reports can classify it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace wopbench
