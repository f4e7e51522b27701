#pragma once

#include <stdexcept>
#include <string>

namespace quantdil {

enum class ErrorCode {
    InvalidParameter,
    DimensionMismatch,
    OutOfRange,
    DomainViolation,
    MomentDivergence,
    MomentRestriction,
    InvalidRegime,
    NoKnownThetaStar,
    UnsupportedDimension,
    RegimeViolation,
    DivergentIntegral,
    QuadratureFailure,
    NonConvergence,
    SingularJacobian,
    ConsistencyError,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::MomentDivergence: return "MomentDivergence";
    case ErrorCode::MomentRestriction: return "MomentRestriction";
    case ErrorCode::InvalidRegime: return "InvalidRegime";
    case ErrorCode::NoKnownThetaStar: return "NoKnownThetaStar";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::RegimeViolation: return "RegimeViolation";
    case ErrorCode::DivergentIntegral: return "DivergentIntegral";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::ConsistencyError: return "ConsistencyError";
    }
    return "Unknown";
}

/// Numerical failures (as opposed to bad input) map to CLI exit code 3.
inline bool is_numerical(ErrorCode code) {
    switch (code) {
    case ErrorCode::QuadratureFailure:
    case ErrorCode::NonConvergence:
    case ErrorCode::SingularJacobian:
    case ErrorCode::ConsistencyError:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Carries the last residual of an iterative solver that ran out of iterations.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double residual, int iterations)
        : Error(ErrorCode::NonConvergence, what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) throw Error(code, message);
}

} // namespace detail
} // namespace quantdil
