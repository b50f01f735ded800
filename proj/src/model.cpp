#include "critkerr/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "critkerr/error.hpp"

namespace critkerr {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidParameter, what);
}

// f(D) = (D - delta)(kappa^2 + D^2) + shift, shift = 2 g_c^2 eps_c^2 / omega_b.
struct FixedPointCubic {
  double delta;
  double kappa2;
  double shift;

  double value(double d) const { return (d - delta) * (kappa2 + d * d) + shift; }
  double slope(double d) const { return 3.0 * d * d - 2.0 * delta * d + kappa2; }
  // Residual of the fixed-point form D - (delta - shift / (kappa^2 + D^2)).
  double residual(double d) const { return value(d) / (kappa2 + d * d); }
};

struct RootResult {
  double root;
  int iterations;
};

// Newton with bisection fallback on a sign-changing bracket [lo, hi].
RootResult safeguarded_newton(const FixedPointCubic& f, double lo, double hi, const LinearizeOptions& opts) {
  double flo = f.value(lo);
  double fhi = f.value(hi);
  if (flo == 0.0) return {lo, 0};
  if (fhi == 0.0) return {hi, 0};
  if (flo > 0.0) {
    std::swap(lo, hi);
    std::swap(flo, fhi);
  }
  double x = 0.5 * (lo + hi);
  for (int it = 1; it <= opts.max_iter; ++it) {
    const double fx = f.value(x);
    if (std::abs(f.residual(x)) < opts.tol) return {x, it};
    if (fx < 0.0) lo = x; else hi = x;
    const double df = f.slope(x);
    double next = (df != 0.0) ? x - fx / df : 0.5 * (lo + hi);
    const double a = std::min(lo, hi), b = std::max(lo, hi);
    if (!(next > a && next < b)) next = 0.5 * (lo + hi);
    if (next == x) return {x, it};
    x = next;
  }
  if (std::abs(f.residual(x)) < opts.tol) return {x, opts.max_iter};
  std::ostringstream msg;
  msg << "no convergence after " << opts.max_iter << " iterations, residual " << f.residual(x);
  throw Error(ErrorKind::FixedPointDivergence, msg.str());
}

}  // namespace

void SystemParams::validate() const {
  require(omega_b > 0.0, "omega_b must be positive");
  require(omega_a > 0.0, "omega_a must be positive");
  require(omega_c > 0.0, "omega_c must be positive");
  require(omega_ci > 0.0, "omega_ci must be positive");
  require(kappa_a > 0.0 && kappa_c > 0.0 && kappa_b > 0.0, "decay rates must be positive");
  require(g_a >= 0.0 && g_c >= 0.0, "couplings must be non-negative");
  require(epsilon_c >= 0.0, "drive amplitude must be non-negative");
  require(std::isfinite(omega_a + omega_b + omega_c + omega_ci + g_a + g_c + epsilon_c), "non-finite parameter");
}

LinearizedModel linearize(const SystemParams& params, const LinearizeOptions& opts) {
  params.validate();
  require(opts.tol > 0.0, "tolerance must be positive");

  const double delta = params.delta_c();
  const double kappa2 = params.kappa_c * params.kappa_c;
  const double shift = 2.0 * params.g_c * params.g_c * params.epsilon_c * params.epsilon_c / params.omega_b;
  const FixedPointCubic f{delta, kappa2, shift};

  LinearizedModel out;

  // Bracket every real root using the stationary points of the cubic.
  // Monic form D^3 - delta D^2 + kappa^2 D + (shift - kappa^2 delta) gives a
  // Cauchy bound for the root magnitudes.
  const double bound = 1.0 + std::max({std::abs(delta), kappa2, std::abs(shift - kappa2 * delta)});
  std::vector<double> edges{-bound};
  const double disc = delta * delta - 3.0 * kappa2;
  double upper_stationary = -bound;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    edges.push_back((delta - s) / 3.0);
    edges.push_back((delta + s) / 3.0);
    upper_stationary = edges.back();
  }
  edges.push_back(bound);

  int iterations = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    const double flo = f.value(lo), fhi = f.value(hi);
    if (flo == 0.0 && i > 0) continue;  // already recorded as the previous hi
    if ((flo < 0.0) != (fhi < 0.0) || fhi == 0.0 || flo == 0.0) {
      const RootResult r = safeguarded_newton(f, lo, hi, opts);
      iterations += r.iterations;
      out.real_roots.push_back(r.root);
    }
  }
  std::sort(out.real_roots.begin(), out.real_roots.end());
  out.iterations = iterations;

  if (delta == 0.0 && shift == 0.0) {
    throw Error(ErrorKind::LinearizationFailure, "undriven resonance delta_c = 0 has no signed root");
  }

  // The branch connected to D = delta at zero drive: for delta > 0 it is the
  // increasing branch right of the upper stationary point, for delta < 0 the
  // leftmost branch (which never folds).
  double root = 0.0;
  bool found = false;
  if (delta > 0.0) {
    for (double r : out.real_roots) {
      if (r > 0.0) { root = r; found = true; }
    }
    if (!found) throw Error(ErrorKind::LinearizationFailure, "no positive root of the fixed-point equation");
    if (disc > 0.0 && root < upper_stationary) {
      std::ostringstream msg;
      msg << "the branch continuing Delta_c = delta_c has folded (largest root " << root
          << " below the turning point " << upper_stationary << ")";
      throw Error(ErrorKind::LinearizationFailure, msg.str());
    }
  } else {
    for (double r : out.real_roots) {
      if (r < 0.0) { root = r; found = true; break; }
    }
    if (!found) throw Error(ErrorKind::LinearizationFailure, "no negative root of the fixed-point equation");
  }

  out.Delta_c = root;
  out.residual = f.residual(root);
  const double denom = kappa2 + root * root;
  out.alpha = std::complex<double>(0.0, -params.epsilon_c) / std::complex<double>(params.kappa_c, root);
  const double alpha2 = params.epsilon_c * params.epsilon_c / denom;
  out.G = params.g_c * std::sqrt(alpha2);
  out.beta = -params.g_c * alpha2 / params.omega_b;
  switch (opts.shift) {
    case OpticalShift::AsPrinted:
      out.omega_a_tilde = params.omega_a - 2.0 * params.g_c * params.g_c * params.epsilon_c * params.epsilon_c /
                                               (params.omega_b * denom);
      break;
    case OpticalShift::MechanicalDisplacement:
      out.omega_a_tilde = params.omega_a + 2.0 * params.g_a * out.beta.real();
      break;
  }
  return out;
}

DriveSetting target_drive(const SystemParams& params, double G_target, double Delta_c_target) {
  params.validate();
  require(G_target >= 0.0, "G_target must be non-negative");
  if (!(Delta_c_target > 0.0)) throw Error(ErrorKind::InvalidDetuning, "Delta_c_target must be positive");

  DriveSetting out;
  if (G_target == 0.0) {
    out.epsilon_c = 0.0;
    out.delta_c = Delta_c_target;
    return out;
  }
  if (params.g_c == 0.0) throw Error(ErrorKind::InfeasibleTarget, "g_c = 0 cannot produce a non-zero G");

  const double kappa2 = params.kappa_c * params.kappa_c;
  const double eps2 = G_target * G_target * (kappa2 + Delta_c_target * Delta_c_target) / (params.g_c * params.g_c);
  if (!(eps2 >= 0.0) || !std::isfinite(eps2)) throw Error(ErrorKind::InfeasibleTarget, "negative drive power");
  out.epsilon_c = std::sqrt(eps2);
  out.delta_c = Delta_c_target + 2.0 * G_target * G_target / params.omega_b;

  // The target must sit on the branch linearize selects: right of the upper
  // stationary point of the cubic whenever that point exists.
  const double disc = out.delta_c * out.delta_c - 3.0 * kappa2;
  if (disc > 0.0 && Delta_c_target <= (out.delta_c + std::sqrt(disc)) / 3.0) {
    std::ostringstream msg;
    msg << "(G, Delta_c) = (" << G_target << ", " << Delta_c_target
        << ") lies on a fixed-point branch not connected to the undriven limit";
    throw Error(ErrorKind::InfeasibleTarget, msg.str());
  }
  return out;
}

SystemParams with_drive(SystemParams params, const DriveSetting& drive) {
  params.epsilon_c = drive.epsilon_c;
  params.omega_ci = params.omega_c - drive.delta_c;
  return params;
}

}  // namespace critkerr
