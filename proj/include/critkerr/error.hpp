#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace critkerr {

enum class ErrorKind {
  InvalidParameter,
  LinearizationFailure,
  FixedPointDivergence,
  InfeasibleTarget,
  InvalidDetuning,
  BeyondCriticalPoint,
  CriticalDivergence,
  QuadratureNotConverged,
  InsufficientTruncation,
  NonStroboscopicPhase,
  UnresolvableComponents,
  DimensionOverflow,
  DegenerateLiouvillian,
  IntegratorFailure,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. The kind is the stable, machine-checkable part;
/// the message carries the diagnostic detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace critkerr
