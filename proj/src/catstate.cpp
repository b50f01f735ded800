#include "critkerr/catstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "critkerr/error.hpp"
#include "critkerr/kernels/kernels.hpp"
#include "critkerr/spectrum.hpp"

namespace critkerr {

using cd = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double truncation_loss(double upsilon_abs, int N_trunc) {
  const double n2 = upsilon_abs * upsilon_abs;
  if (n2 == 0.0) return 0.0;
  // Poisson tail sum_{m > N} exp(-n2) n2^m / m!, summed in log space.
  double loss = 0.0;
  for (int m = N_trunc + 1; m < N_trunc + 100000; ++m) {
    const double term = std::exp(-n2 + m * std::log(n2) - std::lgamma(m + 1.0));
    loss += term;
    if (m > n2 && term < 1e-30 * std::max(loss, 1e-300)) break;
    if (m > n2 && term < 1e-300) break;
  }
  return loss;
}

std::vector<cd> coherent_amplitudes(cd alpha, int N_trunc) {
  std::vector<cd> c(N_trunc + 1);
  const double a = std::abs(alpha);
  const double ph = std::arg(alpha);
  for (int m = 0; m <= N_trunc; ++m) {
    if (a == 0.0) {
      c[m] = (m == 0) ? 1.0 : 0.0;
      continue;
    }
    const double logmag = -0.5 * a * a + m * std::log(a) - 0.5 * std::lgamma(m + 1.0);
    c[m] = std::polar(std::exp(logmag), m * ph);
  }
  return c;
}

namespace {

CatState build(cd upsilon, double theta_K, int N_trunc) {
  const double a = std::abs(upsilon);
  if (N_trunc < 1) throw Error(ErrorKind::InvalidParameter, "N_trunc must be >= 1");
  const double need = a * a + 6.0 * a;
  if (N_trunc < need) {
    std::ostringstream msg;
    msg << "N_trunc = " << N_trunc << " below |Y|^2 + 6|Y| = " << need;
    throw Error(ErrorKind::InsufficientTruncation, msg.str());
  }
  CatState s;
  s.upsilon = upsilon;
  s.theta_K = theta_K;
  s.truncation_loss = truncation_loss(a, N_trunc);
  if (s.truncation_loss > 1e-8) {
    std::ostringstream msg;
    msg << "truncation loss " << s.truncation_loss << " at N_trunc = " << N_trunc;
    throw Error(ErrorKind::InsufficientTruncation, msg.str());
  }
  s.amplitudes = coherent_amplitudes(upsilon, N_trunc);
  const double th = std::fmod(theta_K, kTwoPi);
  for (int m = 0; m <= N_trunc; ++m) {
    const double phase = std::fmod(th * static_cast<double>(m) * static_cast<double>(m), kTwoPi);
    s.amplitudes[m] *= std::polar(1.0, phase);
  }
  if (s.truncation_loss > 1e-12) {
    double norm = 0.0;
    for (const auto& c : s.amplitudes) norm += std::norm(c);
    for (auto& c : s.amplitudes) c /= std::sqrt(norm);
  }
  return s;
}

}  // namespace

CatState cat_from_phase(cd upsilon, double theta_K, int N_trunc) { return build(upsilon, theta_K, N_trunc); }

CatState evolve_cat(cd upsilon, double eta_over_omega, int n, int N_trunc, const CatContext& ctx) {
  if (n < 1) throw Error(ErrorKind::InvalidParameter, "period index n must be >= 1");
  // Fractional part first keeps the Kerr phase accurate for large eta/omega.
  const double x = static_cast<double>(n) * eta_over_omega;
  const double frac = x - std::floor(x);
  CatState s = build(upsilon, kTwoPi * frac, N_trunc);
  s.n_period = n;

  if (ctx.omega_minus > 0.0) {
    const double t_n = kTwoPi * n / ctx.omega_minus;
    s.validity_margin = ctx.kappa_max * t_n;
    if (s.validity_margin > 0.1) {
      std::ostringstream w;
      w << "validity margin kappa_max * t_n = " << s.validity_margin << " is not small";
      s.warnings.push_back(w.str());
    }
    if (ctx.include_zeta_plus && ctx.omega_plus > 0.0) {
      // Fast mode at t_n: residual displacement zeta_+ m (1 - e^{-i omega_+ t_n}) and
      // Kerr phase correction -eta_+ sin(omega_+ t_n)/omega_+ m^2.
      const cd u = ctx.zeta_plus * (1.0 - std::exp(cd(0.0, -ctx.omega_plus * t_n)));
      const double dphi = -ctx.eta_plus * std::sin(ctx.omega_plus * t_n) / ctx.omega_plus;
      const auto& c = s.amplitudes;
      const std::size_t N = c.size();
      std::vector<cd> cc(N);
      for (std::size_t m = 0; m < N; ++m) cc[m] = c[m] * std::polar(1.0, dphi * double(m) * double(m));
      cd fid{};
      for (std::size_t m = 0; m < N; ++m) {
        const cd bm = u * double(m);
        for (std::size_t k = 0; k < N; ++k) {
          const cd bk = u * double(k);
          const cd overlap = std::exp(-0.5 * std::norm(bm) - 0.5 * std::norm(bk) + std::conj(bk) * bm);
          fid += std::conj(c[m]) * cc[m] * overlap * std::conj(cc[k]) * c[k];
        }
      }
      s.zeta_plus_fidelity = fid.real();
    }
  }
  return s;
}

std::optional<Rational> rational_approx(double x, long q_max, double tol) {
  x -= std::floor(x);
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0;
    const long q2 = ai * q1 + q0;
    if (q2 > q_max) break;
    if (std::abs(x - static_cast<double>(p2) / static_cast<double>(q2)) <= tol) {
      Rational out{p2 % q2, q2};
      if (out.p == 0) out.q = 1;
      return out;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double f = r - a;
    if (f < 1e-300) break;
    r = 1.0 / f;
  }
  return std::nullopt;
}

int component_count(const Rational& r) {
  const long q = r.q;
  int count = 0;
  for (long k = 0; k < q; ++k) {
    cd w{};
    for (long m = 0; m < q; ++m) {
      const long e = (r.p * m * m - k * m) % q;
      w += std::polar(1.0, kTwoPi * static_cast<double>(e) / static_cast<double>(q));
    }
    if (std::abs(w) / static_cast<double>(q) > 1e-9) ++count;
  }
  return count;
}

Decomposition decompose_cat(const CatState& state, int q_max, const DecomposeOptions& opts) {
  const double x = state.theta_K / kTwoPi;
  const auto rat = rational_approx(x, q_max, opts.rational_tol);
  if (!rat) {
    std::ostringstream msg;
    msg << "theta_K / 2pi = " << x - std::floor(x) << " has no p/q with q <= " << q_max;
    throw Error(ErrorKind::NonStroboscopicPhase, msg.str());
  }
  const int N = static_cast<int>(state.amplitudes.size()) - 1;
  Eigen::VectorXcd c(N + 1);
  for (int m = 0; m <= N; ++m) c[m] = state.amplitudes[m];

  for (long qp = 1; qp <= rat->q; ++qp) {
    if (rat->q % qp != 0) continue;
    Eigen::MatrixXcd A(N + 1, qp);
    for (long k = 0; k < qp; ++k) {
      const auto col = coherent_amplitudes(state.upsilon * std::polar(1.0, kTwoPi * k / qp), N);
      for (int m = 0; m <= N; ++m) A(m, k) = col[m];
    }
    const Eigen::MatrixXcd gram = A.adjoint() * A;
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram).eigenvalues();
    const double cond = ev.maxCoeff() / std::max(ev.minCoeff(), 1e-300);
    const Eigen::VectorXcd w = A.colPivHouseholderQr().solve(c);
    const Eigen::VectorXcd rec = A * w;
    const double residual = (rec - c).norm();
    if (residual >= opts.residual_tol) continue;
    if (cond > opts.max_condition) {
      std::ostringstream msg;
      msg << qp << " components at |Y| = " << std::abs(state.upsilon) << " give Gram condition " << cond;
      throw Error(ErrorKind::UnresolvableComponents, msg.str());
    }
    Decomposition d;
    d.basis_size = static_cast<int>(qp);
    d.phase_fraction = *rat;
    d.residual = residual;
    d.gram_condition = cond;
    d.fidelity = std::norm(c.dot(rec)) / (c.squaredNorm() * rec.squaredNorm());
    for (long k = 0; k < qp; ++k) {
      d.components.push_back({kTwoPi * k / qp, w[k]});
      if (std::abs(w[k]) > opts.weight_floor) ++d.count;
    }
    return d;
  }
  throw Error(ErrorKind::UnresolvableComponents, "no coherent basis reproduces the state within tolerance");
}

std::vector<cd> recombine(const Decomposition& d, cd upsilon, int N_trunc) {
  std::vector<cd> out(N_trunc + 1);
  for (const auto& comp : d.components) {
    const auto col = coherent_amplitudes(upsilon * std::polar(1.0, comp.phase), N_trunc);
    for (int m = 0; m <= N_trunc; ++m) out[m] += comp.weight * col[m];
  }
  return out;
}

std::vector<double> AxisSpec::points() const {
  std::vector<double> p(steps);
  for (int i = 0; i < steps; ++i) p[i] = (i == steps - 1) ? max : min + step() * i;
  return p;
}

WignerGrid wigner(const std::vector<cd>& psi, const AxisSpec& xa, const AxisSpec& ya, unsigned workers) {
  if (xa.steps < 2 || ya.steps < 2 || !(xa.max > xa.min) || !(ya.max > ya.min))
    throw Error(ErrorKind::InvalidParameter, "wigner axes need steps >= 2 and min < max");
  WignerGrid g;
  g.x_axis = xa.points();
  g.y_axis = ya.points();
  const std::size_t nx = g.x_axis.size(), ny = g.y_axis.size();
  g.values.assign(nx * ny, 0.0);
  if (xa.step() > 0.25 || ya.step() > 0.25) {
    std::ostringstream w;
    w << "grid step " << std::max(xa.step(), ya.step()) << " exceeds 0.25";
    g.warnings.push_back(w.str());
  }
  auto do_row = [&](std::size_t iy) {
    kernels::displaced_parity_row(psi, g.y_axis[iy], g.x_axis,
                                  std::span<double>(g.values.data() + iy * nx, nx));
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    for (std::size_t iy = 0; iy < ny; ++iy) do_row(iy);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t iy = w; iy < ny; iy += workers) do_row(iy);
      });
    for (auto& t : pool) t.join();
  }
  double sum = 0.0;
  for (double v : g.values) sum += v;
  g.normalization = sum * xa.step() * ya.step();
  g.min_value = *std::min_element(g.values.begin(), g.values.end());
  g.max_value = *std::max_element(g.values.begin(), g.values.end());
  return g;
}

WignerGrid wigner(const CatState& state, const AxisSpec& xa, const AxisSpec& ya, unsigned workers) {
  const double R = std::abs(state.upsilon) * std::numbers::sqrt2 + 4.0;
  if (xa.min > -R || xa.max < R || ya.min > -R || ya.max < R) {
    std::ostringstream msg;
    msg << "grid must cover |x|, |y| <= " << R;
    throw Error(ErrorKind::InvalidParameter, msg.str());
  }
  return wigner(state.amplitudes, xa, ya, workers);
}

std::vector<RegimeCell> cat_regime_map(const std::vector<double>& G_values, const std::vector<double>& Delta_values,
                                       const SystemParams& params, const RegimeMapOptions& opts) {
  std::vector<RegimeCell> cells;
  cells.reserve(G_values.size() * Delta_values.size());
  KerrOptions ko;
  ko.divergence_floor = opts.divergence_floor;
  for (double G : G_values) {
    for (double D : Delta_values) {
      RegimeCell cell;
      cell.G = G;
      cell.Delta_c = D;
      try {
        const NormalModes nm = diagonalize(G, D, params.omega_b, params.g_a);
        if (!nm.stable) {
          cell.flag = "unstable";
          cells.push_back(cell);
          continue;
        }
        const PolaronFrame fr = kerr_strength(nm, params.g_a, G, D, params.omega_b, ko);
        cell.eta_over_omega = fr.eta / nm.omega_minus;
      } catch (const Error& e) {
        cell.flag = e.kind() == ErrorKind::CriticalDivergence ? "critical divergence" : std::string(to_string(e.kind()));
        cells.push_back(cell);
        continue;
      }
      const double x = opts.n * cell.eta_over_omega;
      const double fx = x - std::floor(x);
      double best = 2.0;
      Rational best_r;
      for (long q = 1; q <= opts.q_max; ++q) {
        const double p = std::round(fx * q);
        const double dist = std::abs(fx - p / q);
        if (dist < best - 1e-15) {
          best = dist;
          best_r = {static_cast<long>(p) % q, q};
        }
      }
      if (best <= opts.tolerance) {
        if (best_r.p == 0) best_r.q = 1;
        cell.fraction = best_r;
        cell.count = component_count(best_r);
      } else {
        cell.flag = "non-stroboscopic";
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace critkerr
