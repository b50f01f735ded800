#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "critkerr/error.hpp"
#include "critkerr/spectrum.hpp"

namespace critkerr {

/// Weak coherent drive on the optical cavity, frame rotating at the laser.
struct DriveConfig {
  double Delta_a = 0.0;     // omega_a_tilde - omega_ai
  double epsilon_a = 1e-3;  // drive amplitude; cancels from g2(0)
  double kappa_a = 0.1;     // amplitude decay rate of the cavity
  double weak_threshold = 1e-2;

  double Delta_a_tilde(double eta) const { return Delta_a - eta; }
  /// epsilon_a^2 / (kappa_a^2 + Delta_a_tilde^2): lowest-order validity measure.
  double weak_drive_measure(double eta) const;
};

/// One damped normal mode entering the displacement operator
/// P = sum_j sign_j zeta_j (B_j^dag - B_j).
struct KernelMode {
  double zeta = 0.0;
  double omega = 0.0;
  double kappa = 0.0;  // energy decay rate; amplitudes decay as kappa/2
  int sign = 1;
};

/// Stationary vacuum correlators of the displacement exponent. With
///   f(s) = sum_j zeta_j^2 exp(-i omega_j s - kappa_j |s| / 2)
/// every ordered product of exponentials exp(+-P(t)) reduces to sums of f.
struct CorrelationKernel {
  std::vector<KernelMode> modes;

  std::complex<double> f(double s) const;
  double zeta_sq_sum() const;

  /// Modes (-, +) with signs (+1, -1).
  static CorrelationKernel from_frame(const NormalModes& nm, const PolaronFrame& frame);
  static CorrelationKernel single(double zeta, double omega, double kappa);
};

/// exp(-phi2) = <exp(P(tau)) exp(-P(0))>.
std::complex<double> phi2(double tau, const CorrelationKernel& k);

/// exp(-phi4) = <exp(P(t1 - t2)) exp(P(t1)) exp(-P(0)) exp(-P(-t3))>.
std::complex<double> phi4(double t1, double t2, double t3, const CorrelationKernel& k);

struct QuadratureConfig {
  double truncation_c = 12.0;  // domain length in units of 1/kappa_a
  int order = 12;              // Gauss-Legendre points per panel
  double panel_phase = 6.0;    // largest phase advance per panel, radians
  double rel_tol = 1e-3;
  double abs_tol = 1e-10;
  int max_levels = 3;          // panel halvings after the base level
  bool estimate_error = true;
  unsigned workers = 1;
};

struct G2Result {
  double g2 = 0.0;
  double error_bound = 0.0;
  double discretization_error = 0.0;
  double truncation_error = 0.0;
  double photon_number = 0.0;  // <a^dag a> / epsilon_a^2
  double four_point = 0.0;     // <a^dag2 a^2> / epsilon_a^4
  int levels = 0;
  std::size_t nodes = 0;
  double wallclock_s = 0.0;
  bool converged = true;
  std::vector<std::string> warnings;
};

class QuadratureNotConverged : public Error {
 public:
  QuadratureNotConverged(const std::string& detail, G2Result partial)
      : Error(ErrorKind::QuadratureNotConverged, detail), partial_(std::move(partial)) {}
  const G2Result& partial() const noexcept { return partial_; }

 private:
  G2Result partial_;
};

/// Steady-state g2(0) of the weakly driven cavity in the polaron frame.
/// Throws QuadratureNotConverged (with the partial result) when the error
/// estimate exceeds rel_tol * g2 + abs_tol.
G2Result g2_zero(const CorrelationKernel& kernel, double eta, const DriveConfig& drive,
                 const QuadratureConfig& quad = {});
G2Result g2_zero(const NormalModes& nm, const PolaronFrame& frame, const DriveConfig& drive,
                 const QuadratureConfig& quad = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace critkerr
