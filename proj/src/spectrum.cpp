#include "critkerr/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "critkerr/error.hpp"

namespace critkerr {

Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J(0, 1) = 1.0;
  J(1, 0) = -1.0;
  J(2, 3) = 1.0;
  J(3, 2) = -1.0;
  return J;
}

Eigen::Matrix4d quadratic_form(double G, double Delta_c, double omega_b) {
  Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
  K(0, 0) = K(1, 1) = Delta_c;
  K(2, 2) = K(3, 3) = omega_b;
  K(0, 2) = K(2, 0) = -2.0 * G;
  return K;
}

Eigen::Vector2d symplectic_eigenvalues(const Eigen::Matrix4d& K) {
  Eigen::EigenSolver<Eigen::Matrix4d> es(symplectic_form() * K, false);
  std::array<double, 4> im{};
  for (int i = 0; i < 4; ++i) {
    const auto ev = es.eigenvalues()(i);
    if (std::abs(ev.real()) > 1e-9 * (1.0 + std::abs(ev))) {
      return Eigen::Vector2d::Constant(std::numeric_limits<double>::quiet_NaN());
    }
    im[static_cast<std::size_t>(i)] = std::abs(ev.imag());
  }
  std::sort(im.begin(), im.end());
  // Each frequency appears as a +-i pair.
  return {0.5 * (im[0] + im[1]), 0.5 * (im[2] + im[3])};
}

double critical_point(double Delta_c, double omega_b) {
  if (!(Delta_c > 0.0) || !(omega_b > 0.0)) throw Error(ErrorKind::InvalidParameter, "critical_point needs positive arguments");
  return 0.5 * std::sqrt(Delta_c * omega_b);
}

double critical_detuning(double G, double omega_b) {
  if (!(G > 0.0) || !(omega_b > 0.0)) throw Error(ErrorKind::InvalidParameter, "critical_detuning needs positive arguments");
  return 4.0 * G * G / omega_b;
}

NormalModes diagonalize(double G, double Delta_c, double omega_b, double g_a) {
  if (!(Delta_c > 0.0)) throw Error(ErrorKind::InvalidDetuning, "Delta_c must be positive");
  if (!(omega_b > 0.0) || !(G >= 0.0)) throw Error(ErrorKind::InvalidParameter, "omega_b > 0 and G >= 0 required");

  NormalModes nm;
  const double d2 = Delta_c * Delta_c;
  const double w2 = omega_b * omega_b;
  const double mix = 16.0 * G * G * Delta_c * omega_b;
  const double root = std::sqrt((w2 - d2) * (w2 - d2) + mix);
  const double plus_sq = 0.5 * (d2 + w2 + root);
  // omega_-^2 omega_+^2 = det, evaluated without the cancellation of the
  // difference form.
  const double det = Delta_c * omega_b * (Delta_c * omega_b - 4.0 * G * G);
  nm.omega_plus = std::sqrt(plus_sq);
  nm.omega_minus_sq = det / plus_sq;
  nm.omega_minus = std::sqrt(std::abs(nm.omega_minus_sq));
  nm.stable = nm.omega_minus_sq > 0.0;
  if (!nm.stable) {
    nm.g_minus = nm.g_plus = std::numeric_limits<double>::quiet_NaN();
    nm.theta = 0.5 * std::atan2(4.0 * G * std::sqrt(Delta_c * omega_b), d2 - w2);
    return nm;
  }

  // Rotation O diagonalising T^1/2 V T^1/2 with T = diag(Delta_c, omega_b),
  // V = [[Delta_c, -2G], [-2G, omega_b]]; columns (minus, plus), rows (c, b).
  Eigen::Matrix2d O;
  if (G == 0.0) {
    if (Delta_c < omega_b) O << 1.0, 0.0, 0.0, 1.0;
    else O << 0.0, 1.0, 1.0, 0.0;
  } else {
    Eigen::Matrix2d A;
    const double off = -2.0 * G * std::sqrt(Delta_c * omega_b);
    A << d2, off, off, w2;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A);
    O = es.eigenvectors();
  }
  // Sign convention: mechanical component of the minus mode <= 0 and of the
  // plus mode >= 0, so both g_minus and g_plus come out non-negative.
  auto fix_sign = [&](int col, double want) {
    const double bc = O(1, col);
    const bool flip = (std::abs(bc) > 1e-300) ? (bc * want < 0.0) : (O(0, col) < 0.0);
    if (flip) O.col(col) = -O.col(col);
  };
  fix_sign(0, -1.0);
  fix_sign(1, +1.0);

  const Eigen::Vector2d omega(nm.omega_minus, nm.omega_plus);
  const Eigen::Vector2d tsqrt(std::sqrt(Delta_c), std::sqrt(omega_b));
  // x = S y, p = S^{-T} q.
  Eigen::Matrix2d S, Sinv_t;
  for (int r = 0; r < 2; ++r) {
    for (int j = 0; j < 2; ++j) {
      S(r, j) = tsqrt(r) * O(r, j) / std::sqrt(omega(j));
      Sinv_t(r, j) = O(r, j) * std::sqrt(omega(j)) / tsqrt(r);
    }
  }
  for (int r = 0; r < 2; ++r) {
    for (int j = 0; j < 2; ++j) {
      const double u = 0.5 * (S(r, j) + Sinv_t(r, j));
      const double v = 0.5 * (S(r, j) - Sinv_t(r, j));
      nm.transform(2 * r, 2 * j) = u;
      nm.transform(2 * r, 2 * j + 1) = v;
      nm.transform(2 * r + 1, 2 * j) = v;
      nm.transform(2 * r + 1, 2 * j + 1) = u;
    }
  }
  // b + b^dag = sum_j S(b, j) (B_j + B_j^dag).
  nm.g_minus = -g_a * S(1, 0);
  nm.g_plus = g_a * S(1, 1);
  nm.theta = std::atan2(std::abs(O(1, 1)), std::abs(O(1, 0)));
  return nm;
}

NormalModes diagonalize(const LinearizedModel& lin, double omega_b, double g_a) {
  return diagonalize(lin.G, lin.Delta_c, omega_b, g_a);
}

double kerr_eta(double g_a, double G, double Delta_c, double omega_b) {
  return g_a * g_a / (omega_b - 4.0 * G * G / Delta_c);
}

PolaronFrame kerr_strength(const NormalModes& nm, double g_a, double G, double Delta_c, double omega_b,
                           const KerrOptions& opts) {
  if (!nm.stable) throw Error(ErrorKind::BeyondCriticalPoint, "normal modes are unstable (G >= G_cp)");
  PolaronFrame pf;
  pf.critical_margin = (omega_b - 4.0 * G * G / Delta_c) / omega_b;
  pf.eta = kerr_eta(g_a, G, Delta_c, omega_b);
  if (pf.critical_margin < opts.divergence_floor) {
    std::ostringstream msg;
    msg << "omega_b - 4G^2/Delta_c = " << pf.critical_margin * omega_b << " below floor; eta would be " << pf.eta;
    throw Error(ErrorKind::CriticalDivergence, msg.str());
  }
  pf.zeta_minus = nm.g_minus / nm.omega_minus;
  pf.zeta_plus = nm.g_plus / nm.omega_plus;
  pf.kappa_minus = opts.kappa_minus;
  pf.kappa_plus = opts.kappa_plus;
  const double sum = nm.g_minus * pf.zeta_minus + nm.g_plus * pf.zeta_plus;
  pf.sum_rule_residual = (pf.eta > 0.0) ? std::abs(pf.eta - sum) / pf.eta : std::abs(sum);
  if (pf.sum_rule_residual > 1e-6) {
    std::ostringstream msg;
    msg << "Kerr sum rule violated: eta = " << pf.eta << ", sum g^2/omega = " << sum;
    throw Error(ErrorKind::InvalidParameter, msg.str());
  }
  return pf;
}

Eigen::Vector2d estimate_normal_mode_decay(const NormalModes& nm, double kappa_c, double kappa_b) {
  const double c2 = std::cos(nm.theta) * std::cos(nm.theta);
  const double s2 = 1.0 - c2;
  // theta measures how much of the mechanical amplitude sits in the plus mode.
  return {kappa_b * c2 + kappa_c * s2, kappa_b * s2 + kappa_c * c2};
}

KerrWindow kerr_window(double Delta_c, double G, double g_a, double rate, double omega_b) {
  if (!(Delta_c > 0.0) || !(G >= 0.0) || !(rate > 0.0) || !(omega_b > 0.0))
    throw Error(ErrorKind::InvalidParameter, "kerr_window needs positive Delta_c, rate, omega_b and G >= 0");
  KerrWindow w;
  const double margin = omega_b - g_a * g_a / rate;
  if (margin <= 0.0) {
    w.G_width = critical_point(Delta_c, omega_b);
    w.Delta_threshold = std::numeric_limits<double>::infinity();
    w.Delta_width = w.Delta_threshold;
    return w;
  }
  w.G_threshold = std::sqrt(Delta_c * margin) / 2.0;
  const double shift = g_a * g_a / rate;
  w.G_width = std::sqrt(Delta_c) / 2.0 * shift / (std::sqrt(omega_b) + std::sqrt(margin));
  w.Delta_threshold = 4.0 * G * G / margin;
  w.Delta_width = 4.0 * G * G * shift / (margin * omega_b);
  return w;
}

}  // namespace critkerr
