#pragma once

#include <complex>
#include <vector>

namespace critkerr {

/// Raw parameters of the driven three-mode Hamiltonian, in natural units
/// (every frequency and rate divided by the mechanical frequency, so
/// omega_b == 1 unless a caller deliberately works in another scale).
struct SystemParams {
  double omega_b = 1.0;
  double omega_a = 1.0e6;   // optical; only differences matter downstream
  double omega_c = 100.0;   // microwave, 1/sqrt(LC)
  double g_a = 1.0e-3;
  double g_c = 1.0e-3;
  double kappa_a = 0.1;
  double kappa_c = 0.127;
  double kappa_b = 1.0e-4;
  double epsilon_c = 0.0;   // microwave drive amplitude
  double omega_ci = 98.749; // microwave drive frequency

  double delta_c() const noexcept { return omega_c - omega_ci; }

  /// Throws Error(InvalidParameter) on non-positive frequencies/rates or
  /// negative couplings.
  void validate() const;
};

/// How the radiation-pressure shift of the optical frequency is computed.
enum class OpticalShift {
  /// 2 g_c^2 eps_c^2 / (omega_b (kappa_c^2 + Delta_c^2)), the default.
  AsPrinted,
  /// 2 g_a Re(beta): the shift implied by the mechanical displacement.
  MechanicalDisplacement,
};

struct LinearizeOptions {
  double tol = 1e-12;     // absolute residual of the fixed-point equation
  int max_iter = 200;     // per bracketed root
  OpticalShift shift = OpticalShift::AsPrinted;
};

/// Drive-dependent quantities of the linearized Hamiltonian.
struct LinearizedModel {
  double G = 0.0;
  double Delta_c = 0.0;
  double omega_a_tilde = 0.0;
  std::complex<double> alpha{};  // microwave mean field
  std::complex<double> beta{};   // mechanical mean field (diagnostic)

  // Root metadata. real_roots is sorted ascending and holds every real
  // solution of the fixed-point cubic; the selected one is Delta_c.
  std::vector<double> real_roots;
  double residual = 0.0;
  int iterations = 0;
};

/// Solves Delta_c = delta_c - 2 g_c^2 eps_c^2 / (omega_b (kappa_c^2 + Delta_c^2))
/// and returns the linearized couplings for the root that continues the
/// undriven solution Delta_c = delta_c.
LinearizedModel linearize(const SystemParams& params, const LinearizeOptions& opts = {});

struct DriveSetting {
  double epsilon_c = 0.0;
  double delta_c = 0.0;
};

/// Inverse of linearize: drive amplitude and bare detuning that produce the
/// requested (G, Delta_c).
DriveSetting target_drive(const SystemParams& params, double G_target, double Delta_c_target);

/// Copy of params with epsilon_c and omega_ci set from a DriveSetting.
SystemParams with_drive(SystemParams params, const DriveSetting& drive);

}  // namespace critkerr
