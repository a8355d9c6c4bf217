#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qrv {

enum class ErrorKind {
    NotHermitian,
    MatrixNotPsd,
    DimMismatch,
    NonFinite,
    NotAState,
    ComplexValued,
    MassMismatch,
    NotUniform,
    NotDoublyStochastic,
    NotBistochastic,
    InvalidSpace,
    SpaceMismatch,
    InconsistentNullSet,
    FullRankRequired,
    DivisionByZeroMass,
    NotSelfAdjoint,
    SolverStall,
    CycleLimit,
    EigenNoConvergence,
    Validation,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::MatrixNotPsd: return "MatrixNotPsd";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotAState: return "NotAState";
    case ErrorKind::ComplexValued: return "ComplexValued";
    case ErrorKind::MassMismatch: return "MassMismatch";
    case ErrorKind::NotUniform: return "NotUniform";
    case ErrorKind::NotDoublyStochastic: return "NotDoublyStochastic";
    case ErrorKind::NotBistochastic: return "NotBistochastic";
    case ErrorKind::InvalidSpace: return "InvalidSpace";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::InconsistentNullSet: return "InconsistentNullSet";
    case ErrorKind::FullRankRequired: return "FullRankRequired";
    case ErrorKind::DivisionByZeroMass: return "DivisionByZeroMass";
    case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorKind::SolverStall: return "SolverStall";
    case ErrorKind::CycleLimit: return "CycleLimit";
    case ErrorKind::EigenNoConvergence: return "EigenNoConvergence";
    case ErrorKind::Validation: return "Validation";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

} // namespace qrv
