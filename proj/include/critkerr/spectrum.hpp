#pragma once

#include <Eigen/Dense>

#include "critkerr/model.hpp"

namespace critkerr {

/// Bogoliubov normal modes of the microwave-mechanics quadratic form
///   Delta_c c^dag c + omega_b b^dag b - G (c + c^dag)(b + b^dag).
///
/// The lower mode is labelled "minus". At G = 0 it is the bare mode with the
/// smaller frequency; when Delta_c == omega_b exactly the mechanical mode is
/// taken as the minus mode, which is the labelling that continues from the
/// Delta_c > omega_b side.
struct NormalModes {
  double omega_minus = 0.0;     // imaginary magnitude when unstable
  double omega_plus = 0.0;
  double omega_minus_sq = 0.0;  // signed; <= 0 means unstable
  double g_minus = 0.0;         // photon coupling, enters as -g_minus n (B_- + B_-^dag)
  double g_plus = 0.0;          // enters as +g_plus n (B_+ + B_+^dag)
  double theta = 0.0;           // mixing angle in [0, pi/2]; 0 = minus mode purely mechanical
  /// R = M B with R = (c, c^dag, b, b^dag) and B = (B_-, B_-^dag, B_+, B_+^dag).
  Eigen::Matrix4d transform = Eigen::Matrix4d::Zero();
  bool stable = false;
};

/// Canonical commutator form J for the ladder basis (x, x^dag, y, y^dag).
Eigen::Matrix4d symplectic_form();

/// Real symmetric form K with H = 1/2 xi^T K xi, xi = (x_c, p_c, x_b, p_b),
/// x = (c + c^dag)/sqrt(2).
Eigen::Matrix4d quadratic_form(double G, double Delta_c, double omega_b);

/// Symplectic eigenvalues of a positive-definite 4x4 quadrature form, sorted
/// ascending. Obtained from the spectrum of J K, which is +-i omega.
Eigen::Vector2d symplectic_eigenvalues(const Eigen::Matrix4d& K);

NormalModes diagonalize(double G, double Delta_c, double omega_b, double g_a);
NormalModes diagonalize(const LinearizedModel& lin, double omega_b, double g_a);

double critical_point(double Delta_c, double omega_b = 1.0);
double critical_detuning(double G, double omega_b = 1.0);

struct KerrOptions {
  double divergence_floor = 1e-8;  // minimum of (omega_b - 4G^2/Delta_c)/omega_b
  double kappa_minus = 0.05;
  double kappa_plus = 0.05;
};

/// Polaron-frame quantities: displacements, Kerr strength, normal-mode decay.
struct PolaronFrame {
  double zeta_minus = 0.0;
  double zeta_plus = 0.0;
  double eta = 0.0;
  double kappa_minus = 0.0;
  double kappa_plus = 0.0;
  double sum_rule_residual = 0.0;  // |eta - sum_j g_j^2/omega_j| / eta
  double critical_margin = 0.0;    // (omega_b - 4G^2/Delta_c)/omega_b
};

double kerr_eta(double g_a, double G, double Delta_c, double omega_b = 1.0);

PolaronFrame kerr_strength(const NormalModes& nm, double g_a, double G, double Delta_c, double omega_b,
                           const KerrOptions& opts = {});

/// Stable parameter windows in which eta exceeds a rate: G in [G_threshold, G_cp)
/// at fixed Delta_c, and Delta_c in (Delta_cp, Delta_threshold] at fixed G.
struct KerrWindow {
  double G_threshold = 0.0;
  double G_width = 0.0;
  double Delta_threshold = 0.0;
  double Delta_width = 0.0;
};

KerrWindow kerr_window(double Delta_c, double G, double g_a, double rate, double omega_b = 1.0);

/// Non-normative estimate of the normal-mode energy decay rates from the bare
/// rates, weighting each bare mode by its share of the normal mode.
Eigen::Vector2d estimate_normal_mode_decay(const NormalModes& nm, double kappa_c, double kappa_b);

}  // namespace critkerr
