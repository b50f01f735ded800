#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "critkerr/error.hpp"
#include "critkerr/oracle.hpp"
#include "critkerr/spectrum.hpp"

using namespace critkerr;
using namespace critkerr::oracle;
using cd = std::complex<double>;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::ConfigError;
}

TruncatedSystem driven_cavity(double Delta, double eps, double kappa, int levels, double eta = 0.0) {
  DrivenSpec s;
  s.Delta_a = Delta;
  s.eta = eta;
  s.epsilon_a = eps;
  s.kappa_a = kappa;
  return build(s, {levels});
}

}  // namespace

TEST_CASE("linearized model without coupling has no microwave cross terms") {
  LinearizedSpec s;
  s.G = 0.0;
  s.Delta_c = 1.251;
  s.g_a = 0.0;
  const TruncatedSystem sys = build(s, {2, 4, 4});
  const Dense H = Dense(sys.hamiltonian);
  CHECK((H - Dense(H.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(hermiticity_error(sys.hamiltonian) == 0.0);
}

TEST_CASE("linearized spectrum equals the normal-mode ladder") {
  LinearizedSpec s;
  s.G = 0.5;
  s.Delta_c = 1.251;
  s.g_a = 1e-3;
  const TruncatedSystem sys = build(s, {2, 30, 30});
  const Eigen::VectorXd E = sector_spectrum(sys, 0, 0);
  const NormalModes nm = diagonalize(0.5, 1.251, 1.0, 1e-3);
  std::vector<double> ladder;
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) ladder.push_back(a * nm.omega_minus + b * nm.omega_plus);
  std::sort(ladder.begin(), ladder.end());
  for (int k = 1; k < 5; ++k) CHECK(std::abs((E[k] - E[0]) - ladder[k]) < 1e-6);
  CHECK(E[0] == doctest::Approx((nm.omega_minus + nm.omega_plus - 1.251 - 1.0) / 2.0).epsilon(1e-6));
}

TEST_CASE("polaron and normal-mode Kerr gaps") {
  PolaronSpec p;
  p.Delta_a = 0.0;
  p.eta = 0.02;
  p.omegas = {0.36};
  const TruncatedSystem ps = build(p, {3, 2});
  CHECK(std::abs(sector_ground_energy(ps, 0, 2) - 2.0 * sector_ground_energy(ps, 0, 1) +
                 sector_ground_energy(ps, 0, 0) + 0.04) < 1e-14);

  const Check c = check_kerr_gap(ValidationConfig{});
  CHECK(c.pass);
  CHECK(std::abs(c.value - c.reference) < 1e-8);
  const Check conv = check_truncation_convergence(ValidationConfig{});
  CHECK(conv.pass);
}

TEST_CASE("build errors") {
  LinearizedSpec s;
  CHECK(kind_of([&] { build(s, {2, 2}); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([&] { build(s, {1, 4, 4}); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([&] { build(s, {50, 50, 50}); }) == ErrorKind::DimensionOverflow);
  CHECK(kind_of([&] { build(s, {10, 10, 10}, 500); }) == ErrorKind::DimensionOverflow);
}

TEST_CASE("steady states of linear cavities") {
  const TruncatedSystem undriven = driven_cavity(0.2, 0.0, 0.1, 6);
  // epsilon = 0 leaves only decay
  const SteadyState v = steady_state(undriven);
  CHECK(std::abs(v.rho(0, 0) - 1.0) < 1e-10);
  CHECK(v.trace_error < 1e-12);

  const TruncatedSystem driven = driven_cavity(0.2, 0.05, 0.1, 14);
  const SteadyState ss = steady_state(driven);
  const double n = (Dense(driven.number(0)) * ss.rho).trace().real();
  CHECK(std::abs(n - 0.0025 / (0.01 + 0.04)) < 1e-6);
  CHECK(ss.hermiticity_error < 1e-10);
  CHECK(ss.min_eigenvalue > -1e-9);
  CHECK(ss.leakage_ok);
  CHECK(steady_g2(driven, ss.rho) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("leakage into the top Fock levels is flagged") {
  const SteadyState ss = steady_state(driven_cavity(0.0, 0.5, 0.1, 5));
  CHECK_FALSE(ss.leakage_ok);
  CHECK(ss.top_level_population > 1e-6);
}

TEST_CASE("degenerate Liouvillian is detected") {
  TruncatedSystem sys;
  sys.dims = {3, 3};
  sys.modes = {"x", "y"};
  sys.hamiltonian = SpMat(sys.number(0) + 0.7 * sys.number(1));
  sys.collapse_ops.push_back({sys.annihilator(0), 0.2, "x"});
  CHECK(kind_of([&] { steady_state(sys); }) == ErrorKind::DegenerateLiouvillian);
}

TEST_CASE("Krylov propagation agrees with the dense exponential") {
  const TruncatedSystem sys = driven_cavity(0.3, 0.2, 0.1, 12, 0.05);
  const SpMat L = liouvillian(sys);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Vec v(L.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cd(g(rng), g(rng));
  ExpvOptions krylov;
  krylov.dense_below = 0;
  for (double t : {0.1, 3.0, 40.0}) {
    const Vec a = expv(t, L, v, krylov);
    const Dense tL = t * Dense(L);
    const Vec b = tL.exp() * v;
    CHECK((a - b).norm() < 1e-8 * v.norm());
  }
}

TEST_CASE("propagation preserves trace and hermiticity") {
  const TruncatedSystem sys = driven_cavity(0.3, 0.2, 0.1, 25, 0.05);
  Dense rho = Dense::Zero(25, 25);
  rho(3, 3) = 1.0;
  ExpvOptions krylov;
  krylov.dense_below = 0;
  const Dense r = propagate(sys, rho, 15.0, krylov);
  CHECK(std::abs(r.trace() - 1.0) < 1e-8);
  CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("Krylov error control gives up after too many rejections") {
  const TruncatedSystem sys = driven_cavity(0.3, 0.2, 0.1, 30, 0.05);
  const SpMat L = liouvillian(sys);
  Vec v = Vec::Zero(L.rows());
  v[0] = 1.0;
  ExpvOptions o;
  o.dense_below = 0;
  o.krylov_dim = 2;
  o.tol = 1e-300;
  o.max_rejections = 0;
  CHECK(kind_of([&] { expv(50.0, L, v, o); }) == ErrorKind::IntegratorFailure);
}

TEST_CASE("regression: decaying field correlation") {
  const TruncatedSystem sys = driven_cavity(0.4, 0.0, 0.1, 6);
  Dense rho = Dense::Zero(6, 6);
  rho(1, 1) = 1.0;
  const SpMat a = sys.annihilator(0);
  const SpMat ad = SpMat(a.adjoint());
  for (double tau : {0.0, 1.0, 7.5}) {
    const cd c = regression_correlator(sys, rho, {{ad, tau}, {a, 0.0}});
    const cd expected = std::exp(cd(-0.1, 0.4) * tau);
    CHECK(std::abs(c - expected) < 1e-8);
  }
  CHECK(kind_of([&] { regression_correlator(sys, rho, {{a, 1.0}, {a, 2.0}, {a, 0.5}, {a, 1.5}}); }) ==
        ErrorKind::InvalidParameter);
}

TEST_CASE("full model: weak microwave drive gives the linear response amplitude") {
  FullSpec s;
  s.params.g_a = 1e-3;
  s.params.g_c = 1e-3;
  s.params.epsilon_c = 1e-3;
  s.params.kappa_c = 0.127;
  s.params.kappa_b = 1e-2;
  s.Delta_a = 0.5;
  const TruncatedSystem sys = build(s, {2, 3, 4});
  const SteadyState ss = steady_state(sys);
  const cd c = (Dense(sys.annihilator(2)) * ss.rho).trace();
  const cd expected = cd(0.0, -1e-3) / cd(0.127, s.params.delta_c());
  CHECK(std::abs(c - expected) < 1e-3 * std::abs(expected));
}

TEST_CASE("Kerr-only g2 and the validation report") {
  const Check c = check_kerr_g2(ValidationConfig{});
  CHECK(c.pass);
  ValidationReport r;
  r.checks.push_back(c);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["all_pass"].get<bool>());
  CHECK(j["checks"].size() == 1);
}
