#include "bsq/error.hpp"

namespace bsq {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::PoleError: return "PoleError";
    case ErrorKind::CrossingError: return "CrossingError";
    case ErrorKind::SeedNotFound: return "SeedNotFound";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::DegenerateGradient: return "DegenerateGradient";
    case ErrorKind::CrossingOnCurve: return "CrossingOnCurve";
    case ErrorKind::PoleOnCurve: return "PoleOnCurve";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::UnwrapFailure: return "UnwrapFailure";
    case ErrorKind::NotPlanar: return "NotPlanar";
    case ErrorKind::OriginOnCurve: return "OriginOnCurve";
    case ErrorKind::RoundingAmbiguous: return "RoundingAmbiguous";
    case ErrorKind::NonMonotone: return "NonMonotone";
    case ErrorKind::UnsupportedSymbol: return "UnsupportedSymbol";
    case ErrorKind::PlanTooSmall: return "PlanTooSmall";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::MatchFailure: return "MatchFailure";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

SyntaxError::SyntaxError(std::size_t offset, const std::string& message)
    : Error(ErrorKind::SyntaxError,
            "offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

}  // namespace bsq
