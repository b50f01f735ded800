#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "critkerr/model.hpp"
#include "critkerr/spectrum.hpp"

namespace critkerr::oracle {

using cd = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cd, Eigen::ColMajor>;
using Dense = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Collapse operator with rate: contributes rate * D[op].
struct Collapse {
  SpMat op;
  double rate = 0.0;
  std::string name;
};

/// Finite product-Fock model. Mode k has Fock levels 0..dims[k]-1 and the
/// product basis index is row-major over modes: the last mode varies fastest.
struct TruncatedSystem {
  std::vector<int> dims;
  std::vector<std::string> modes;
  SpMat hamiltonian;
  std::vector<Collapse> collapse_ops;

  long dimension() const;
  /// Annihilation operator of mode k embedded in the product space.
  SpMat annihilator(std::size_t k) const;
  SpMat number(std::size_t k) const;
  SpMat identity() const;
};

// Model specifications. Bare modes decay with amplitude rate kappa
// (collapse sqrt(2 kappa) x); normal modes with energy rate kappa_j (collapse
// sqrt(kappa_j) B_j).

/// Three-mode driven Hamiltonian in the frame of the microwave drive and the
/// optical laser; modes (a, b, c).
struct FullSpec {
  SystemParams params;
  double Delta_a = 0.0;    // omega_a - omega_ai
  double epsilon_a = 0.0;  // optional weak optical drive
};

/// Linearized Hamiltonian; modes (a, b, c).
struct LinearizedSpec {
  double G = 0.0;
  double Delta_c = 1.0;
  double omega_b = 1.0;
  double g_a = 1e-3;
  double Delta_a = 0.0;  // omega_a_tilde in the laser frame
  double epsilon_a = 0.0;
  double kappa_a = 0.0, kappa_b = 0.0, kappa_c = 0.0;
};

struct NormalModeTerm {
  double g = 0.0;      // photon coupling strength
  double omega = 1.0;
  double kappa = 0.0;  // energy decay rate
  int sign = 1;        // enters as -sign * g n (B + B^dag)
};

/// Photon coupled to normal modes (before the polaron transform); modes (a, B_1, ...).
struct NormalModeSpec {
  double Delta_a = 0.0;
  double epsilon_a = 0.0;
  double kappa_a = 0.0;
  std::vector<NormalModeTerm> modes;

  static NormalModeSpec from_modes(const NormalModes& nm, double Delta_a, double kappa_minus = 0.0,
                                   double kappa_plus = 0.0);
};

/// Polaron frame without drive: Delta_a n - eta n^2 + sum omega_j B_j^dag B_j.
struct PolaronSpec {
  double Delta_a = 0.0;
  double eta = 0.0;
  std::vector<double> omegas;
};

struct DrivenMode {
  double zeta = 0.0;
  double omega = 1.0;
  double kappa = 0.0;
  int sign = 1;  // P = sum_j sign_j zeta_j (B_j^dag - B_j)
};

/// Weakly driven polaron-frame cavity:
///   Delta_a n - eta n^2 + eps (a^dag e^{-P} + e^{P} a) + sum omega_j B_j^dag B_j.
struct DrivenSpec {
  double Delta_a = 0.0;
  double eta = 0.0;
  double epsilon_a = 0.0;
  double kappa_a = 0.1;
  std::vector<DrivenMode> modes;
  bool dressed_jump = true;  // cavity collapse a e^{P} instead of a
};

using ModelSpec = std::variant<FullSpec, LinearizedSpec, NormalModeSpec, PolaronSpec, DrivenSpec>;

/// Throws DimensionOverflow when prod(dims) > budget.
TruncatedSystem build(const ModelSpec& spec, const std::vector<int>& dims, long budget = 100000);

/// exp(s zeta (B^dag - B)) of mode k, exponentiated in the truncated space.
SpMat displacement(const TruncatedSystem& sys, std::size_t k, double s_zeta);

/// Liouvillian acting on column-stacked density matrices.
SpMat liouvillian(const TruncatedSystem& sys);

struct SteadyState {
  Dense rho;
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  double top_level_population = 0.0;  // max over modes of weight in the two highest levels
  bool leakage_ok = true;
};

SteadyState steady_state(const TruncatedSystem& sys);

/// exp(t A) v. Krylov (Arnoldi) with local error control; dense
/// exponential when A is smaller than dense_below.
struct ExpvOptions {
  int krylov_dim = 30;
  double tol = 1e-10;
  int max_rejections = 20;
  long dense_below = 400;
};
Vec expv(double t, const SpMat& A, const Vec& v, const ExpvOptions& opts = {});

/// rho(t) from rho(0) under the Lindblad generator.
Dense propagate(const TruncatedSystem& sys, const Dense& rho, double t, const ExpvOptions& opts = {});

/// Operator at a time, for multi-time correlators.
struct TimedOp {
  SpMat op;
  double time = 0.0;
};

/// <O_1(u_1) O_2(u_2) ... O_k(u_k)> in the state rho at the earliest time, for
/// unimodal time sequences u_1 <= ... <= u_p >= ... >= u_k (quantum regression).
cd regression_correlator(const TruncatedSystem& sys, const Dense& rho, const std::vector<TimedOp>& ops,
                         const ExpvOptions& opts = {});

/// Lowest eigenvalue of H restricted to mode k in Fock level n (H must
/// conserve that mode's number).
double sector_ground_energy(const TruncatedSystem& sys, std::size_t k, int n);
/// All eigenvalues of that block, ascending.
Eigen::VectorXd sector_spectrum(const TruncatedSystem& sys, std::size_t k, int n);

double hermiticity_error(const SpMat& H);

// Validation suite, one check per analytic claim.

struct Check {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  std::string metric;  // "abs" or "rel"
  bool pass = false;
  std::string detail;
};

struct ValidationConfig {
  double G = 0.5;
  double Delta_c = 1.251;
  double g_a = 1e-3;
  double omega_b = 1.0;
  double kappa_a = 0.1;
  std::vector<int> kerr_dims{3, 12, 12};
  double phi2_zeta = 0.3, phi2_omega = 0.36, phi2_kappa = 0.05;
  std::vector<double> phi2_times{1.0, 5.0, 20.0};
  int phi2_levels = 60;
  double kerr_eta_over_kappa = 10.0;
  int kerr_levels = 10;
};

struct ValidationReport {
  std::vector<Check> checks;
  bool all_pass() const;
  std::string to_json() const;
};

Check check_kerr_gap(const ValidationConfig& cfg);
std::vector<Check> check_phi2(const ValidationConfig& cfg);
Check check_kerr_g2(const ValidationConfig& cfg);
Check check_truncation_convergence(const ValidationConfig& cfg);
ValidationReport run_validation(const ValidationConfig& cfg = {});

/// g2(0) of the steady state for mode k: <a^dag2 a^2> / <a^dag a>^2.
double steady_g2(const TruncatedSystem& sys, const Dense& rho, std::size_t k = 0);

}  // namespace critkerr::oracle
