#include "critkerr/error.hpp"

namespace critkerr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::LinearizationFailure: return "linearization failure";
    case ErrorKind::FixedPointDivergence: return "fixed-point divergence";
    case ErrorKind::InfeasibleTarget: return "infeasible target";
    case ErrorKind::InvalidDetuning: return "invalid detuning";
    case ErrorKind::BeyondCriticalPoint: return "beyond critical point";
    case ErrorKind::CriticalDivergence: return "critical divergence";
    case ErrorKind::QuadratureNotConverged: return "quadrature not converged";
    case ErrorKind::InsufficientTruncation: return "insufficient truncation";
    case ErrorKind::NonStroboscopicPhase: return "non-stroboscopic phase";
    case ErrorKind::UnresolvableComponents: return "unresolvable components";
    case ErrorKind::DimensionOverflow: return "dimension overflow";
    case ErrorKind::DegenerateLiouvillian: return "degenerate Liouvillian";
    case ErrorKind::IntegratorFailure: return "integrator failure";
    case ErrorKind::ConfigError: return "config error";
  }
  return "unknown error";
}

}  // namespace critkerr
