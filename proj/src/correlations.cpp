#include "critkerr/correlations.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "critkerr/kernels/kernels.hpp"

namespace critkerr {

using cd = std::complex<double>;

double DriveConfig::weak_drive_measure(double eta) const {
  const double dt = Delta_a_tilde(eta);
  return epsilon_a * epsilon_a / (kappa_a * kappa_a + dt * dt);
}

cd CorrelationKernel::f(double s) const {
  cd acc{};
  const double a = std::abs(s);
  for (const auto& m : modes) {
    if (m.zeta == 0.0) continue;
    acc += m.zeta * m.zeta * std::exp(cd(-0.5 * m.kappa * a, -m.omega * s));
  }
  return acc;
}

double CorrelationKernel::zeta_sq_sum() const {
  double s = 0.0;
  for (const auto& m : modes) s += m.zeta * m.zeta;
  return s;
}

CorrelationKernel CorrelationKernel::from_frame(const NormalModes& nm, const PolaronFrame& frame) {
  CorrelationKernel k;
  k.modes.push_back({frame.zeta_minus, nm.omega_minus, frame.kappa_minus, +1});
  k.modes.push_back({frame.zeta_plus, nm.omega_plus, frame.kappa_plus, -1});
  return k;
}

CorrelationKernel CorrelationKernel::single(double zeta, double omega, double kappa) {
  CorrelationKernel k;
  k.modes.push_back({zeta, omega, kappa, +1});
  return k;
}

cd phi2(double tau, const CorrelationKernel& k) {
  if (tau < 0.0) throw Error(ErrorKind::InvalidParameter, "phi2 needs tau >= 0");
  return k.f(0.0) - k.f(tau);
}

cd phi4(double t1, double t2, double t3, const CorrelationKernel& k) {
  if (t1 < 0.0 || t2 < 0.0 || t3 < 0.0) throw Error(ErrorKind::InvalidParameter, "phi4 needs non-negative times");
  return 2.0 * k.f(0.0) + k.f(-t2) + k.f(t3) - k.f(t1 - t2) - k.f(t1 - t2 + t3) - k.f(t1) - k.f(t1 + t3);
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= order; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int n = 2; n <= order; ++n) {
      const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[order - 1 - i] = x;
    weights[i] = weights[order - 1 - i] = w;
  }
}

namespace {

/// Composite rule with log-weights; complex log-weights encode exponential tails.
struct Rule {
  std::vector<double> t;
  std::vector<cd> logw;

  void clear() {
    t.clear();
    logw.clear();
  }
};

struct Panels {
  std::vector<double> x, w;
  double h = 1.0;

  void append(Rule& r, double a, double b) const {
    if (!(b > a)) return;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / h - 1e-12)));
    const double width = (b - a) / static_cast<double>(n);
    for (std::size_t p = 0; p < n; ++p) {
      const double lo = a + width * static_cast<double>(p);
      for (std::size_t i = 0; i < x.size(); ++i) {
        r.t.push_back(lo + 0.5 * width * (x[i] + 1.0));
        r.logw.push_back(std::log(0.5 * width * w[i]));
      }
    }
  }
};

/// Extra node at t_end standing for the integral of g(t_end) exp(rate (t - t_end)) over the tail.
void append_tail(Rule& r, double t_end, cd rate, bool upper) {
  r.t.push_back(t_end);
  r.logw.push_back(std::log(upper ? -1.0 / rate : 1.0 / rate));
}

cd pairwise_sum(const std::vector<cd>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    cd s{};
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

struct LevelValue {
  double g2 = 0.0;
  double n = 0.0;
  double four = 0.0;
  std::size_t nodes = 0;
};

class G2Integrator {
 public:
  G2Integrator(const CorrelationKernel& kernel, double eta, const DriveConfig& drive, const QuadratureConfig& quad)
      : quad_(quad), kappa_(drive.kappa_a), eta_(eta), dt_(drive.Delta_a_tilde(eta)) {
    for (const auto& m : kernel.modes)
      if (m.zeta != 0.0) modes_.push_back(m);
    f0_ = kernel_f(0.0);
    gauss_legendre(quad.order, panels_.x, panels_.w);
    b1_ = cd(-3.0 * kappa_, 2.0 * eta_ - dt_);
    b3_ = cd(-kappa_, -dt_);
    lam_lo_ = cd(kappa_, -dt_);
    lam_hi_ = cd(-2.0 * kappa_, 2.0 * eta_ - 2.0 * dt_);
  }

  double fastest_rate() const {
    double r = std::max({kappa_, std::abs(dt_), std::abs(2.0 * eta_ - dt_), std::abs(2.0 * eta_ - 2.0 * dt_)});
    for (const auto& m : modes_) {
      const double z2 = m.zeta * m.zeta;
      if (z2 > 1e-6) r = std::max(r, m.omega);
      r = std::max(r, z2 * std::hypot(m.omega, 0.5 * m.kappa));
    }
    return r;
  }

  LevelValue evaluate(double c, double h) {
    panels_.h = h;
    const double T = c / kappa_;
    LevelValue out;

    Rule r2;
    panels_.append(r2, 0.0, T);
    append_tail(r2, T, cd(-kappa_, -dt_), true);
    cd i2{};
    for (std::size_t i = 0; i < r2.t.size(); ++i) {
      i2 += std::exp(r2.logw[i] + cd(-kappa_, -dt_) * r2.t[i] - f0_ + kernel_f(r2.t[i]));
    }

    Rule rd;
    append_tail(rd, -T, lam_lo_, false);
    panels_.append(rd, -T, 0.0);
    panels_.append(rd, 0.0, 0.5 * T);
    append_tail(rd, 0.5 * T, lam_hi_, true);

    std::vector<cd> J(rd.t.size());
    std::vector<std::size_t> counts(rd.t.size());
    const unsigned workers = std::max(1u, quad_.workers);
    if (workers == 1) {
      Scratch s;
      for (std::size_t j = 0; j < rd.t.size(); ++j) J[j] = d_slice(rd.t[j], rd.logw[j], T, s, counts[j]);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          Scratch s;
          for (std::size_t j = w; j < rd.t.size(); j += workers) J[j] = d_slice(rd.t[j], rd.logw[j], T, s, counts[j]);
        });
      }
      for (auto& t : pool) t.join();
    }
    const cd i4 = pairwise_sum(J, 0, J.size());
    for (auto c_ : counts) out.nodes += c_;
    out.nodes += r2.t.size();

    out.n = i2.real() / kappa_;
    out.four = 2.0 * i4.real() / kappa_;
    out.g2 = out.four / (out.n * out.n);
    return out;
  }

 private:
  struct Scratch {
    Rule r1, re;
    std::vector<double> base_re, base_im;
    std::vector<std::vector<double>> u_re, u_im;
    std::vector<kernels::ComplexSpan> spans;
    std::vector<cd> coef;
  };

  cd kernel_f(double s) const {
    cd acc{};
    const double a = std::abs(s);
    for (const auto& m : modes_) acc += m.zeta * m.zeta * std::exp(cd(-0.5 * m.kappa * a, -m.omega * s));
    return acc;
  }

  static cd growth(const KernelMode& m, double s) { return std::exp(cd(-0.5 * m.kappa * s, -m.omega * s)); }

  cd d_slice(double d, cd logw_d, double T, Scratch& s, std::size_t& count) {
    const double t1_lo = std::max(0.0, d);
    s.r1.clear();
    panels_.append(s.r1, t1_lo, t1_lo + T / 3.0);
    append_tail(s.r1, t1_lo + T / 3.0, b1_, true);

    s.re.clear();
    if (d < 0.0) {
      panels_.append(s.re, d, 0.0);
      panels_.append(s.re, 0.0, d + T);
    } else {
      panels_.append(s.re, d, d + T);
    }
    append_tail(s.re, d + T, b3_, true);

    const std::size_t ne = s.re.t.size();
    const std::size_t nm = modes_.size();
    s.base_re.resize(ne);
    s.base_im.resize(ne);
    s.u_re.resize(nm);
    s.u_im.resize(nm);
    s.spans.resize(nm);
    s.coef.resize(nm);
    for (std::size_t k = 0; k < ne; ++k) {
      const double e = s.re.t[k];
      const cd L = s.re.logw[k] + b3_ * e + kernel_f(e);
      s.base_re[k] = L.real();
      s.base_im[k] = L.imag();
    }
    for (std::size_t m = 0; m < nm; ++m) {
      s.u_re[m].resize(ne);
      s.u_im[m].resize(ne);
      const double z2 = modes_[m].zeta * modes_[m].zeta;
      for (std::size_t k = 0; k < ne; ++k) {
        const cd u = z2 * growth(modes_[m], s.re.t[k]);
        s.u_re[m][k] = u.real();
        s.u_im[m][k] = u.imag();
      }
      s.spans[m] = {s.u_re[m].data(), s.u_im[m].data()};
    }

    const cd outer = logw_d + 2.0 * kappa_ * d - 2.0 * f0_ + kernel_f(d);
    cd acc{};
    for (std::size_t i = 0; i < s.r1.t.size(); ++i) {
      const double t1 = s.r1.t[i];
      const cd c0 = outer + s.r1.logw[i] + b1_ * t1 - kernel_f(d - t1) + kernel_f(t1);
      for (std::size_t m = 0; m < nm; ++m) s.coef[m] = growth(modes_[m], -d) * (growth(modes_[m], t1) - 1.0);
      acc += kernels::sum_exp_affine(c0, {s.base_re.data(), s.base_im.data()}, s.spans, s.coef, ne);
    }
    count = s.r1.t.size() * ne;
    return acc;
  }

  QuadratureConfig quad_;
  double kappa_, eta_, dt_;
  std::vector<KernelMode> modes_;
  cd f0_;
  Panels panels_;
  cd b1_, b3_, lam_lo_, lam_hi_;
};

}  // namespace

G2Result g2_zero(const CorrelationKernel& kernel, double eta, const DriveConfig& drive, const QuadratureConfig& quad) {
  const auto start = std::chrono::steady_clock::now();
  if (!(drive.kappa_a > 0.0)) throw Error(ErrorKind::InvalidParameter, "kappa_a must be positive");
  for (const auto& m : kernel.modes) {
    if (m.zeta != 0.0 && !(m.kappa > 0.0 && m.omega > 0.0))
      throw Error(ErrorKind::InvalidParameter, "kernel modes need positive omega and kappa");
  }
  if (!(quad.truncation_c > 0.0) || quad.order < 2 || !(quad.panel_phase > 0.0))
    throw Error(ErrorKind::InvalidParameter, "invalid quadrature configuration");

  G2Result res;
  if (drive.weak_drive_measure(eta) >= drive.weak_threshold) {
    std::ostringstream w;
    w << "weak-drive measure " << drive.weak_drive_measure(eta) << " exceeds " << drive.weak_threshold;
    res.warnings.push_back(w.str());
  }

  G2Integrator integ(kernel, eta, drive, quad);
  const double h0 = quad.panel_phase / integ.fastest_rate();
  const double c = quad.truncation_c;

  LevelValue v = integ.evaluate(c, h0);
  res.nodes += v.nodes;
  double h = h0;
  if (quad.estimate_error) {
    for (int lev = 1; lev <= quad.max_levels; ++lev) {
      h = h0 / std::ldexp(1.0, lev);
      const LevelValue fine = integ.evaluate(c, h);
      res.nodes += fine.nodes;
      res.discretization_error = std::abs(fine.g2 - v.g2);
      v = fine;
      res.levels = lev;
      if (res.discretization_error <= 0.25 * (quad.rel_tol * std::abs(v.g2) + quad.abs_tol)) break;
    }
    const LevelValue half = integ.evaluate(0.5 * c, h);
    res.nodes += half.nodes;
    res.truncation_error = std::abs(v.g2 - half.g2);
  }
  res.g2 = v.g2;
  res.photon_number = v.n;
  res.four_point = v.four;
  res.error_bound = res.discretization_error + res.truncation_error;
  res.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (quad.estimate_error && res.error_bound > quad.rel_tol * std::abs(res.g2) + quad.abs_tol) {
    res.converged = false;
    std::ostringstream msg;
    msg << "g2 = " << res.g2 << " with error bound " << res.error_bound << " after " << res.levels << " refinements";
    res.warnings.push_back(msg.str());
    throw QuadratureNotConverged(msg.str(), res);
  }
  return res;
}

G2Result g2_zero(const NormalModes& nm, const PolaronFrame& frame, const DriveConfig& drive,
                 const QuadratureConfig& quad) {
  if (!nm.stable) throw Error(ErrorKind::BeyondCriticalPoint, "g2 needs stable normal modes");
  return g2_zero(CorrelationKernel::from_frame(nm, frame), frame.eta, drive, quad);
}

}  // namespace critkerr
