#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bsq {

enum class ErrorKind {
  SyntaxError,
  UnknownIdentifier,
  DomainError,
  PoleError,
  CrossingError,
  SeedNotFound,
  NotClosed,
  DegenerateGradient,
  CrossingOnCurve,
  PoleOnCurve,
  Inconsistent,
  UnwrapFailure,
  NotPlanar,
  OriginOnCurve,
  RoundingAmbiguous,
  NonMonotone,
  UnsupportedSymbol,
  PlanTooSmall,
  ConvergenceFailure,
  MatchFailure,
  ConfigError,
};

std::string_view error_name(ErrorKind kind) noexcept;

/// Base class of every failure raised by the library. `kind()` names the
/// failure the way it is reported on the command line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message);

  /// 0-based byte offset into the parsed text.
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace bsq
