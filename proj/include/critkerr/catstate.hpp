#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "critkerr/model.hpp"

namespace critkerr {

/// Cavity state at the stroboscopic time t_n = 2 n pi / omega_minus:
///   c_m = exp(-|Y|^2/2) Y^m / sqrt(m!) exp(i theta_K m^2).
struct CatState {
  std::vector<std::complex<double>> amplitudes;
  std::complex<double> upsilon;
  double theta_K = 0.0;
  int n_period = 1;
  double truncation_loss = 0.0;
  double validity_margin = 0.0;       // kappa_max * t_n; 0 when rates are not supplied
  double zeta_plus_fidelity = 1.0;    // overlap with the state including the fast-mode branch
  std::vector<std::string> warnings;
};

/// Optional physical context for the validity margin and the fast-mode toggle.
struct CatContext {
  double omega_minus = 0.0;
  double kappa_max = 0.0;
  bool include_zeta_plus = false;
  double zeta_plus = 0.0;
  double omega_plus = 0.0;
  double eta_plus = 0.0;  // g_+^2 / omega_+
};

double truncation_loss(double upsilon_abs, int N_trunc);

CatState evolve_cat(std::complex<double> upsilon, double eta_over_omega, int n, int N_trunc,
                    const CatContext& ctx = {});

/// Cat state directly from a Kerr phase, for phases not tied to a period count.
CatState cat_from_phase(std::complex<double> upsilon, double theta_K, int N_trunc);

/// Coherent-state amplitudes |alpha> truncated to N + 1 Fock levels.
std::vector<std::complex<double>> coherent_amplitudes(std::complex<double> alpha, int N_trunc);

struct Rational {
  long p = 0;
  long q = 1;
};

/// Best rational approximation with denominator <= q_max by continued fractions;
/// empty when none lies within tol of x.
std::optional<Rational> rational_approx(double x, long q_max, double tol);

struct CatComponent {
  double phase = 0.0;  // arg of the coherent amplitude relative to Upsilon
  std::complex<double> weight;
};

struct Decomposition {
  std::vector<CatComponent> components;  // all q' basis states, in phase order
  int count = 0;                          // weights with |w| > 1e-3
  int basis_size = 0;                     // q'
  Rational phase_fraction;                // theta_K / 2 pi as p/q
  double residual = 0.0;
  double gram_condition = 0.0;
  double fidelity = 0.0;
};

struct DecomposeOptions {
  double rational_tol = 1e-6;
  double residual_tol = 1e-6;
  double weight_floor = 1e-3;
  double max_condition = 1e10;
};

Decomposition decompose_cat(const CatState& state, int q_max = 12, const DecomposeOptions& opts = {});

/// Recombine components into Fock amplitudes.
std::vector<std::complex<double>> recombine(const Decomposition& d, std::complex<double> upsilon, int N_trunc);

/// Number of coherent components of the Kerr state with theta_K / 2 pi = p / q.
int component_count(const Rational& r);

struct AxisSpec {
  double min = -6.0;
  double max = 6.0;
  int steps = 121;
  std::vector<double> points() const;
  double step() const { return (max - min) / (steps - 1); }
};

struct WignerGrid {
  std::vector<double> x_axis, y_axis;
  std::vector<double> values;  // row-major: values[iy * nx + ix]
  double normalization = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  std::vector<std::string> warnings;

  double at(std::size_t ix, std::size_t iy) const { return values[iy * x_axis.size() + ix]; }
};

/// W(x, y) with x = (a + a^dag)/sqrt(2), y = -i(a - a^dag)/sqrt(2).
WignerGrid wigner(const CatState& state, const AxisSpec& x, const AxisSpec& y, unsigned workers = 1);
WignerGrid wigner(const std::vector<std::complex<double>>& psi, const AxisSpec& x, const AxisSpec& y,
                  unsigned workers = 1);

struct RegimeCell {
  double G = 0.0;
  double Delta_c = 0.0;
  double eta_over_omega = 0.0;
  std::optional<Rational> fraction;
  std::optional<int> count;  // empty: non-stroboscopic or flagged
  std::string flag;          // "", "unstable", "critical divergence", "non-stroboscopic"
};

struct RegimeMapOptions {
  int n = 1;
  long q_max = 12;
  double tolerance = 1e-3;  // |n eta/omega_- - p/q| accepted for a cell
  double divergence_floor = 1e-8;
};

std::vector<RegimeCell> cat_regime_map(const std::vector<double>& G_values, const std::vector<double>& Delta_values,
                                       const SystemParams& params, const RegimeMapOptions& opts = {});

}  // namespace critkerr
