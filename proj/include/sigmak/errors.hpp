#pragma once

#include <stdexcept>
#include <string>

namespace sigmak {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (v <= 0, non-finite jet, ...).
struct DomainError : Error {
    using Error::Error;
};

// Caller violated a documented precondition (missing xi_tt, k < 2 for the classifier, ...).
struct ContractError : Error {
    using Error::Error;
};

// |xi_t| == 1 where a branch sign is required.
struct BranchUndefinedError : ContractError {
    using ContractError::ContractError;
};

// (h, branch, parity) combination that no radial solution realizes.
struct InadmissibleError : Error {
    using Error::Error;
};

// critical_h requested for a (sign, 2k vs n) combination without a threshold.
struct NoThresholdError : Error {
    using Error::Error;
};

} // namespace sigmak
