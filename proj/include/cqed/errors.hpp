#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

enum class ErrorCode {
    NonPositiveDefinite,
    SingularMatrix,
    InvalidCutoff,
    DimensionMismatch,
    MissingFlux,
    EigensolveFailure,
    IncompleteCover,
    GridEdge,
    StepFailure,
    RangeExit,
    NonMonotoneMap,
    ZeroAnharmonicity,
    ZeroAnchor,
    UndefinedArg,
    MissingLabel,
    NoBracket,
    BudgetExhausted,
    ParseError,
    UnknownKey,
    MissingUnits,
    InvalidArgument,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace cqed
