#include "critkerr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>
#include <json.hpp>

#include "critkerr/correlations.hpp"
#include "critkerr/error.hpp"

namespace critkerr::oracle {

namespace {

SpMat destroy(int N) {
  SpMat a(N, N);
  std::vector<Eigen::Triplet<cd>> t;
  for (int m = 1; m < N; ++m) t.emplace_back(m - 1, m, std::sqrt(static_cast<double>(m)));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SpMat eye(long N) {
  SpMat I(N, N);
  I.setIdentity();
  return I;
}

SpMat embed(const std::vector<int>& dims, std::size_t k, const SpMat& op) {
  long before = 1, after = 1;
  for (std::size_t i = 0; i < k; ++i) before *= dims[i];
  for (std::size_t i = k + 1; i < dims.size(); ++i) after *= dims[i];
  SpMat left = Eigen::kroneckerProduct(eye(before), op).eval();
  SpMat full = Eigen::kroneckerProduct(left, eye(after)).eval();
  return full;
}

SpMat adjoint(const SpMat& A) { return SpMat(A.adjoint()); }

void check_dims(const std::vector<int>& dims, std::size_t expected, long budget) {
  if (dims.size() != expected) {
    std::ostringstream msg;
    msg << "model needs " << expected << " mode truncations, got " << dims.size();
    throw Error(ErrorKind::InvalidParameter, msg.str());
  }
  long total = 1;
  for (int d : dims) {
    if (d < 2) throw Error(ErrorKind::InvalidParameter, "every truncation must be >= 2");
    total *= d;
    if (total > budget) {
      std::ostringstream msg;
      msg << "product dimension exceeds budget " << budget;
      throw Error(ErrorKind::DimensionOverflow, msg.str());
    }
  }
}

void add_collapse(TruncatedSystem& sys, const SpMat& op, double rate, const std::string& name) {
  if (rate > 0.0) sys.collapse_ops.push_back({op, rate, name});
}

TruncatedSystem build_full(const FullSpec& s, const std::vector<int>& dims, long budget) {
  check_dims(dims, 3, budget);
  TruncatedSystem sys;
  sys.dims = dims;
  sys.modes = {"a", "b", "c"};
  const SpMat a = sys.annihilator(0), b = sys.annihilator(1), c = sys.annihilator(2);
  const SpMat ad = adjoint(a), bd = adjoint(b), cd_ = adjoint(c);
  const SpMat na = ad * a, nc = cd_ * c, xb = b + bd;
  const auto& p = s.params;
  sys.hamiltonian = p.delta_c() * nc + s.Delta_a * na + p.omega_b * (bd * b) + p.g_a * (na * xb) +
                    p.g_c * (nc * xb) + p.epsilon_c * (c + cd_) + s.epsilon_a * (a + ad);
  add_collapse(sys, a, 2.0 * p.kappa_a, "a");
  add_collapse(sys, b, 2.0 * p.kappa_b, "b");
  add_collapse(sys, c, 2.0 * p.kappa_c, "c");
  return sys;
}

TruncatedSystem build_linearized(const LinearizedSpec& s, const std::vector<int>& dims, long budget) {
  check_dims(dims, 3, budget);
  TruncatedSystem sys;
  sys.dims = dims;
  sys.modes = {"a", "b", "c"};
  const SpMat a = sys.annihilator(0), b = sys.annihilator(1), c = sys.annihilator(2);
  const SpMat ad = adjoint(a), bd = adjoint(b), cd_ = adjoint(c);
  const SpMat na = ad * a;
  sys.hamiltonian = s.Delta_a * na + s.omega_b * (bd * b) + s.Delta_c * (cd_ * c) + s.g_a * (na * (b + bd)) -
                    s.G * ((c + cd_) * (b + bd)) + s.epsilon_a * (a + ad);
  add_collapse(sys, a, 2.0 * s.kappa_a, "a");
  add_collapse(sys, b, 2.0 * s.kappa_b, "b");
  add_collapse(sys, c, 2.0 * s.kappa_c, "c");
  return sys;
}

TruncatedSystem build_normal(const NormalModeSpec& s, const std::vector<int>& dims, long budget) {
  check_dims(dims, 1 + s.modes.size(), budget);
  TruncatedSystem sys;
  sys.dims = dims;
  sys.modes = {"a"};
  for (std::size_t j = 0; j < s.modes.size(); ++j) sys.modes.push_back("B" + std::to_string(j));
  const SpMat a = sys.annihilator(0), ad = adjoint(a), na = ad * a;
  sys.hamiltonian = s.Delta_a * na + s.epsilon_a * (a + ad);
  add_collapse(sys, a, 2.0 * s.kappa_a, "a");
  for (std::size_t j = 0; j < s.modes.size(); ++j) {
    const auto& m = s.modes[j];
    const SpMat B = sys.annihilator(j + 1), Bd = adjoint(B);
    sys.hamiltonian += m.omega * (Bd * B) - (m.sign * m.g) * (na * (B + Bd));
    add_collapse(sys, B, m.kappa, sys.modes[j + 1]);
  }
  return sys;
}

TruncatedSystem build_polaron(const PolaronSpec& s, const std::vector<int>& dims, long budget) {
  check_dims(dims, 1 + s.omegas.size(), budget);
  TruncatedSystem sys;
  sys.dims = dims;
  sys.modes = {"a"};
  for (std::size_t j = 0; j < s.omegas.size(); ++j) sys.modes.push_back("B" + std::to_string(j));
  const SpMat na = sys.number(0);
  sys.hamiltonian = s.Delta_a * na - s.eta * (na * na);
  for (std::size_t j = 0; j < s.omegas.size(); ++j) sys.hamiltonian += s.omegas[j] * sys.number(j + 1);
  return sys;
}

TruncatedSystem build_driven(const DrivenSpec& s, const std::vector<int>& dims, long budget) {
  check_dims(dims, 1 + s.modes.size(), budget);
  TruncatedSystem sys;
  sys.dims = dims;
  sys.modes = {"a"};
  for (std::size_t j = 0; j < s.modes.size(); ++j) sys.modes.push_back("B" + std::to_string(j));
  const SpMat a = sys.annihilator(0), ad = adjoint(a), na = ad * a;
  SpMat eP = sys.identity(), emP = sys.identity();
  for (std::size_t j = 0; j < s.modes.size(); ++j) {
    const double sz = s.modes[j].sign * s.modes[j].zeta;
    eP = SpMat(eP * displacement(sys, j + 1, sz));
    emP = SpMat(emP * displacement(sys, j + 1, -sz));
  }
  sys.hamiltonian = s.Delta_a * na - s.eta * (na * na) + s.epsilon_a * (ad * emP + eP * a);
  for (std::size_t j = 0; j < s.modes.size(); ++j) {
    sys.hamiltonian += s.modes[j].omega * sys.number(j + 1);
    add_collapse(sys, sys.annihilator(j + 1), s.modes[j].kappa, sys.modes[j + 1]);
  }
  add_collapse(sys, s.dressed_jump ? SpMat(eP * a) : a, 2.0 * s.kappa_a, "a");
  return sys;
}

std::vector<long> strides(const std::vector<int>& dims) {
  std::vector<long> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

double inf_norm(const SpMat& A) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.maxCoeff();
}

Vec vec(const Dense& rho) { return Eigen::Map<const Vec>(rho.data(), rho.size()); }

Dense unvec(const Vec& v, long d) { return Eigen::Map<const Dense>(v.data(), d, d); }

Vec expv_with(double t, const SpMat& A, const Vec& v, const ExpvOptions& opts) { return expv(t, A, v, opts); }

}  // namespace

long TruncatedSystem::dimension() const {
  long d = 1;
  for (int n : dims) d *= n;
  return d;
}

SpMat TruncatedSystem::annihilator(std::size_t k) const { return embed(dims, k, destroy(dims[k])); }

SpMat TruncatedSystem::number(std::size_t k) const {
  const SpMat a = annihilator(k);
  return SpMat(adjoint(a) * a);
}

SpMat TruncatedSystem::identity() const { return eye(dimension()); }

NormalModeSpec NormalModeSpec::from_modes(const NormalModes& nm, double Delta_a, double kappa_minus,
                                          double kappa_plus) {
  NormalModeSpec s;
  s.Delta_a = Delta_a;
  s.modes.push_back({nm.g_minus, nm.omega_minus, kappa_minus, +1});
  s.modes.push_back({nm.g_plus, nm.omega_plus, kappa_plus, -1});
  return s;
}

TruncatedSystem build(const ModelSpec& spec, const std::vector<int>& dims, long budget) {
  TruncatedSystem sys = std::visit(
      [&](const auto& s) -> TruncatedSystem {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FullSpec>) return build_full(s, dims, budget);
        if constexpr (std::is_same_v<T, LinearizedSpec>) return build_linearized(s, dims, budget);
        if constexpr (std::is_same_v<T, NormalModeSpec>) return build_normal(s, dims, budget);
        if constexpr (std::is_same_v<T, PolaronSpec>) return build_polaron(s, dims, budget);
        if constexpr (std::is_same_v<T, DrivenSpec>) return build_driven(s, dims, budget);
      },
      spec);
  sys.hamiltonian.prune(cd(0.0));
  const double herm = hermiticity_error(sys.hamiltonian);
  if (herm > 1e-12) {
    std::ostringstream msg;
    msg << "Hamiltonian not Hermitian: " << herm;
    throw Error(ErrorKind::InvalidParameter, msg.str());
  }
  return sys;
}

double hermiticity_error(const SpMat& H) {
  const SpMat diff = H - adjoint(H);
  double m = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

SpMat displacement(const TruncatedSystem& sys, std::size_t k, double s_zeta) {
  const int N = sys.dims[k];
  const Dense a = Dense(destroy(N));
  const Dense gen = s_zeta * (a.adjoint() - a);
  const Dense D = gen.exp();
  SpMat Ds = D.sparseView(1e-300);
  return embed(sys.dims, k, Ds);
}

SpMat liouvillian(const TruncatedSystem& sys) {
  const long d = sys.dimension();
  const SpMat I = eye(d);
  const SpMat& H = sys.hamiltonian;
  SpMat Ht = SpMat(H.transpose());
  SpMat L = cd(0.0, -1.0) * (SpMat(Eigen::kroneckerProduct(I, H)) - SpMat(Eigen::kroneckerProduct(Ht, I)));
  for (const auto& c : sys.collapse_ops) {
    const SpMat& C = c.op;
    const SpMat CdC = adjoint(C) * C;
    const SpMat Cconj = SpMat(C.conjugate());
    const SpMat CdCt = SpMat(CdC.transpose());
    L += c.rate * (SpMat(Eigen::kroneckerProduct(Cconj, C)) - 0.5 * SpMat(Eigen::kroneckerProduct(I, CdC)) -
                   0.5 * SpMat(Eigen::kroneckerProduct(CdCt, I)));
  }
  L.prune(cd(0.0));
  L.makeCompressed();
  return L;
}

SteadyState steady_state(const TruncatedSystem& sys) {
  if (sys.collapse_ops.empty()) throw Error(ErrorKind::InvalidParameter, "steady state needs a collapse operator");
  const long d = sys.dimension();
  const SpMat L = liouvillian(sys);
  std::vector<Eigen::Triplet<cd>> trip;
  trip.reserve(L.nonZeros() + d);
  for (int k = 0; k < L.outerSize(); ++k)
    for (SpMat::InnerIterator it(L, k); it; ++it)
      if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
  for (long i = 0; i < d; ++i) trip.emplace_back(0, i * d + i, 1.0);
  SpMat M(d * d, d * d);
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();

  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::DegenerateLiouvillian, "Liouvillian has a degenerate null space");
  Vec rhs = Vec::Zero(d * d);
  rhs[0] = 1.0;
  const Vec x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw Error(ErrorKind::DegenerateLiouvillian, "steady-state solve failed");
  const double resid = (L * x).norm();
  if (resid > 1e-8 * std::max(1.0, x.norm())) {
    std::ostringstream msg;
    msg << "steady-state residual " << resid << " suggests multiple steady states";
    throw Error(ErrorKind::DegenerateLiouvillian, msg.str());
  }

  SteadyState ss;
  Dense rho = unvec(x, d);
  ss.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  rho = 0.5 * (rho + rho.adjoint());
  ss.trace_error = std::abs(rho.trace() - 1.0);
  if (d <= 2000) {
    Eigen::SelfAdjointEigenSolver<Dense> es(rho, Eigen::EigenvaluesOnly);
    ss.min_eigenvalue = es.eigenvalues().minCoeff();
  }
  const auto st = strides(sys.dims);
  for (std::size_t k = 0; k < sys.dims.size(); ++k) {
    double top = 0.0;
    for (long i = 0; i < d; ++i) {
      const long level = (i / st[k]) % sys.dims[k];
      if (level >= sys.dims[k] - 2) top += rho(i, i).real();
    }
    ss.top_level_population = std::max(ss.top_level_population, top);
  }
  ss.leakage_ok = ss.top_level_population < 1e-6;
  ss.rho = std::move(rho);
  return ss;
}

Vec expv(double t, const SpMat& A, const Vec& v, const ExpvOptions& opts) {
  const long n = A.rows();
  if (t == 0.0) return v;
  if (n < opts.dense_below) {
    const Dense E = (t * Dense(A)).exp();
    return E * v;
  }
  const int m = static_cast<int>(std::min<long>(opts.krylov_dim, n - 1));
  const double anorm = std::max(inf_norm(A), 1e-300);
  const double tol = opts.tol;
  const double gamma = 0.9, delta = 1.2;
  const double breakdown_tol = 1e-12 * anorm;

  Vec w = v;
  double beta = w.norm();
  if (beta == 0.0) return w;
  const double beta0 = beta;
  const double tf = std::abs(t);
  const double sgn = t > 0 ? 1.0 : -1.0;
  const double fact = std::pow((m + 1) / std::numbers::e, m + 1) * std::sqrt(2.0 * std::numbers::pi * (m + 1));
  double tau = std::min(tf, (1.0 / anorm) * std::pow((fact * tol) / (4.0 * beta * anorm), 1.0 / m));

  Dense V(n, m + 1);
  Dense H(m + 2, m + 2);
  double t_now = 0.0;
  int guard = 0;
  while (t_now < tf) {
    if (++guard > 100000) throw Error(ErrorKind::IntegratorFailure, "Krylov propagation made no progress");
    tau = std::min(tf - t_now, tau);
    V.col(0) = w / beta;
    H.setZero();
    int mb = m;
    bool breakdown = false;
    for (int j = 0; j < m; ++j) {
      Vec p = sgn * (A * V.col(j));
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const cd h = V.col(i).dot(p);
          H(i, j) += h;
          p -= h * V.col(i);
        }
      }
      const double s = p.norm();
      if (s < breakdown_tol) {
        breakdown = true;
        mb = j + 1;
        tau = tf - t_now;
        break;
      }
      H(j + 1, j) = s;
      V.col(j + 1) = p / s;
    }
    double avnorm = 0.0;
    if (!breakdown) {
      H(m + 1, m) = 1.0;
      avnorm = (A * V.col(m)).norm();
    }
    Dense F;
    double err_loc = 0.0;
    for (int reject = 0;; ++reject) {
      const int mx = breakdown ? mb : m + 2;
      F = (tau * H.topLeftCorner(mx, mx)).exp();
      if (breakdown) break;
      const double p1 = std::abs(beta * F(m, 0));
      const double p2 = std::abs(beta * F(m + 1, 0)) * avnorm;
      if (p1 > 10.0 * p2) err_loc = p2;
      else if (p1 > p2) err_loc = p1 * p2 / (p1 - p2);
      else err_loc = p1;
      err_loc = std::max(err_loc, 1e-300);
      if (err_loc <= delta * tau * tol * beta0) break;
      if (reject >= opts.max_rejections) {
        std::ostringstream msg;
        msg << "Krylov step rejected " << reject << " times at t = " << t_now;
        throw Error(ErrorKind::IntegratorFailure, msg.str());
      }
      tau = gamma * tau * std::pow(tau * tol * beta0 / err_loc, 1.0 / m);
    }
    const int mx = breakdown ? mb : m + 1;
    w = V.leftCols(mx) * (beta * F.col(0).head(mx));
    beta = w.norm();
    t_now += tau;
    if (beta == 0.0) break;
    if (!breakdown) {
      const double next = gamma * tau * std::pow(tau * tol * beta0 / err_loc, 1.0 / m);
      tau = std::min(next, 5.0 * tau);
    }
  }
  return w;
}

Dense propagate(const TruncatedSystem& sys, const Dense& rho, double t, const ExpvOptions& opts) {
  const SpMat L = liouvillian(sys);
  return unvec(expv(t, L, vec(rho), opts), sys.dimension());
}

cd regression_correlator(const TruncatedSystem& sys, const Dense& rho, const std::vector<TimedOp>& ops,
                         const ExpvOptions& opts) {
  if (ops.empty()) return rho.trace();
  const std::size_t k = ops.size();
  std::size_t peak = 0;
  for (std::size_t i = 1; i < k; ++i)
    if (ops[i].time > ops[peak].time) peak = i;
  for (std::size_t i = 1; i <= peak; ++i)
    if (ops[i].time < ops[i - 1].time) throw Error(ErrorKind::InvalidParameter, "time sequence is not unimodal");
  for (std::size_t i = peak + 1; i < k; ++i)
    if (ops[i].time > ops[i - 1].time) throw Error(ErrorKind::InvalidParameter, "time sequence is not unimodal");

  const long d = sys.dimension();
  const SpMat L = liouvillian(sys);
  Dense X = rho;
  std::size_t li = 0;      // next left operator (acts from the right on X)
  std::size_t ri = k - 1;  // next right operator (acts from the left on X)
  double t_cur = std::min(ops.front().time, ops.back().time);
  auto advance = [&](double t) {
    if (t > t_cur) X = unvec(expv_with(t - t_cur, L, vec(X), opts), d);
    t_cur = t;
  };
  while (li < peak || ri > peak) {
    const bool take_left = li < peak && (ri <= peak || ops[li].time <= ops[ri].time);
    if (take_left) {
      advance(ops[li].time);
      X = X * ops[li].op;
      ++li;
    } else {
      advance(ops[ri].time);
      X = ops[ri].op * X;
      --ri;
    }
  }
  advance(ops[peak].time);
  return (ops[peak].op * X).trace();
}

Eigen::VectorXd sector_spectrum(const TruncatedSystem& sys, std::size_t k, int n) {
  const long d = sys.dimension();
  const auto st = strides(sys.dims);
  std::vector<long> idx;
  for (long i = 0; i < d; ++i)
    if ((i / st[k]) % sys.dims[k] == n) idx.push_back(i);
  const Dense Hd = Dense(sys.hamiltonian);
  Dense block(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) block(r, c) = Hd(idx[r], idx[c]);
  Eigen::SelfAdjointEigenSolver<Dense> es(block, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double sector_ground_energy(const TruncatedSystem& sys, std::size_t k, int n) {
  return sector_spectrum(sys, k, n).minCoeff();
}

double steady_g2(const TruncatedSystem& sys, const Dense& rho, std::size_t k) {
  const SpMat a = sys.annihilator(k);
  const SpMat ad = adjoint(a);
  const SpMat n = ad * a;
  const SpMat n2 = ad * ad * a * a;
  const double num = (n2 * rho).trace().real();
  const double den = (n * rho).trace().real();
  return num / (den * den);
}

namespace {

Check make_check(std::string name, double value, double reference, double tol, const std::string& metric) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.reference = reference;
  c.tolerance = tol;
  c.metric = metric;
  const double err = metric == "rel" ? std::abs(value - reference) / std::abs(reference) : std::abs(value - reference);
  c.pass = std::isfinite(err) && err <= tol;
  return c;
}

double kerr_gap(const ValidationConfig& cfg, const std::vector<int>& dims) {
  const NormalModes nm = diagonalize(cfg.G, cfg.Delta_c, cfg.omega_b, cfg.g_a);
  const TruncatedSystem sys = build(NormalModeSpec::from_modes(nm, 0.0), dims);
  return sector_ground_energy(sys, 0, 2) - 2.0 * sector_ground_energy(sys, 0, 1) + sector_ground_energy(sys, 0, 0);
}

TruncatedSystem damped_mode(double omega, double kappa, int levels) {
  TruncatedSystem sys;
  sys.dims = {levels};
  sys.modes = {"B"};
  sys.hamiltonian = omega * sys.number(0);
  sys.collapse_ops.push_back({sys.annihilator(0), kappa, "B"});
  return sys;
}

cd phi2_oracle(const ValidationConfig& cfg, double tau, int levels) {
  const TruncatedSystem sys = damped_mode(cfg.phi2_omega, cfg.phi2_kappa, levels);
  const SteadyState ss = steady_state(sys);
  const cd corr = regression_correlator(sys, ss.rho, {{displacement(sys, 0, cfg.phi2_zeta), tau},
                                                      {displacement(sys, 0, -cfg.phi2_zeta), 0.0}});
  return -std::log(corr);
}

}  // namespace

Check check_kerr_gap(const ValidationConfig& cfg) {
  const double eta = kerr_eta(cfg.g_a, cfg.G, cfg.Delta_c, cfg.omega_b);
  Check c = make_check("kerr two-photon gap", kerr_gap(cfg, cfg.kerr_dims), -2.0 * eta, 1e-8, "abs");
  std::ostringstream d;
  d << "E(2) - 2E(1) + E(0) of the normal-mode truncation at G = " << cfg.G << ", Delta_c = " << cfg.Delta_c;
  c.detail = d.str();
  return c;
}

std::vector<Check> check_phi2(const ValidationConfig& cfg) {
  std::vector<Check> out;
  const CorrelationKernel k = CorrelationKernel::single(cfg.phi2_zeta, cfg.phi2_omega, cfg.phi2_kappa);
  for (double tau : cfg.phi2_times) {
    const cd analytic = phi2(tau, k);
    const cd numeric = phi2_oracle(cfg, tau, cfg.phi2_levels);
    Check c = make_check("phi2 at tau = " + std::to_string(tau), std::abs(numeric - analytic) / std::abs(analytic),
                         0.0, 1e-3, "abs");
    std::ostringstream d;
    d << "analytic " << analytic << ", regression " << numeric << " (value is the relative difference)";
    c.detail = d.str();
    out.push_back(c);
  }
  return out;
}

Check check_kerr_g2(const ValidationConfig& cfg) {
  const double eta = cfg.kerr_eta_over_kappa * cfg.kappa_a;
  DrivenSpec s;
  s.Delta_a = eta;
  s.eta = eta;
  s.epsilon_a = 1e-2 * cfg.kappa_a;
  s.kappa_a = cfg.kappa_a;
  const TruncatedSystem sys = build(s, {cfg.kerr_levels});
  const SteadyState ss = steady_state(sys);
  const double g2_oracle = steady_g2(sys, ss.rho);

  DriveConfig drive;
  drive.Delta_a = eta;
  drive.kappa_a = cfg.kappa_a;
  drive.epsilon_a = s.epsilon_a;
  const G2Result q = g2_zero(CorrelationKernel{}, eta, drive);
  Check c = make_check("kerr-only g2(0)", q.g2, g2_oracle, 1e-2, "rel");
  c.pass = c.pass && q.g2 < 0.1 && g2_oracle < 0.1;
  std::ostringstream d;
  d << "quadrature " << q.g2 << " (bound " << q.error_bound << "), Lindblad " << g2_oracle;
  c.detail = d.str();
  return c;
}

Check check_truncation_convergence(const ValidationConfig& cfg) {
  std::vector<int> bigger = cfg.kerr_dims;
  for (auto& d : bigger) d += 2;
  const double a = kerr_gap(cfg, cfg.kerr_dims);
  const double b = kerr_gap(cfg, bigger);
  Check c = make_check("kerr gap truncation stability", a, b, 1e-10, "abs");
  c.detail = "dims vs dims + 2";
  return c;
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string ValidationReport::to_json() const {
  nlohmann::json j;
  j["all_pass"] = all_pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"value", c.value},
                           {"reference", c.reference},
                           {"tolerance", c.tolerance},
                           {"metric", c.metric},
                           {"pass", c.pass},
                           {"detail", c.detail}});
  }
  return j.dump(2);
}

ValidationReport run_validation(const ValidationConfig& cfg) {
  ValidationReport r;
  r.checks.push_back(check_kerr_gap(cfg));
  r.checks.push_back(check_truncation_convergence(cfg));
  for (auto& c : check_phi2(cfg)) r.checks.push_back(c);
  r.checks.push_back(check_kerr_g2(cfg));
  return r;
}

}  // namespace critkerr::oracle
