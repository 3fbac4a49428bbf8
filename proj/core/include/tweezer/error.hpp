#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tweezer {

enum class ErrorCode {
  InvalidArgument,
  SingularGeometry,
  Convergence,
  NonPlanar,
  UnstableCrystal,
  DivisionGuard,
  Resonance,
  UndefinedNormalization,
  Degeneracy,
  Validity,
  Unsupported,
};

/// Stable machine-readable name for an error code (used on stderr by the CLI).
constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::SingularGeometry: return "singular-geometry";
    case ErrorCode::Convergence: return "convergence";
    case ErrorCode::NonPlanar: return "non-planar";
    case ErrorCode::UnstableCrystal: return "unstable-crystal";
    case ErrorCode::DivisionGuard: return "division-guard";
    case ErrorCode::Resonance: return "resonance";
    case ErrorCode::UndefinedNormalization: return "undefined-normalization";
    case ErrorCode::Degeneracy: return "degeneracy";
    case ErrorCode::Validity: return "validity";
    case ErrorCode::Unsupported: return "unsupported";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by the equilibrium solver; carries the last dimensionless force residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(ErrorCode::Convergence, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace tweezer
