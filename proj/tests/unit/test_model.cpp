#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "critkerr/error.hpp"
#include "critkerr/model.hpp"

using namespace critkerr;

namespace {

SystemParams reference_params() {
  SystemParams p;
  p.g_c = 1e-3;
  p.kappa_c = 0.127;
  return p;
}

double fixed_point_residual(const SystemParams& p, double Delta) {
  const double k2 = p.kappa_c * p.kappa_c;
  return Delta - p.delta_c() + 2.0 * p.g_c * p.g_c * p.epsilon_c * p.epsilon_c / (p.omega_b * (k2 + Delta * Delta));
}

}  // namespace

TEST_CASE("undriven limit leaves every shift at zero") {
  SystemParams p = reference_params();
  p.epsilon_c = 0.0;
  p.omega_ci = p.omega_c - 1.251;
  const LinearizedModel lin = linearize(p);
  CHECK(lin.Delta_c == doctest::Approx(1.251).epsilon(1e-14));
  CHECK(lin.G == 0.0);
  CHECK(lin.omega_a_tilde == p.omega_a);
  CHECK(std::abs(lin.alpha) == 0.0);
}

TEST_CASE("inverse problem at the reference operating point") {
  const SystemParams p = reference_params();
  const DriveSetting d = target_drive(p, 0.5595, 1.251);
  CHECK(d.epsilon_c == doctest::Approx(703.53).epsilon(0.01 / 703.53));
  CHECK(d.delta_c == doctest::Approx(1.877081).epsilon(1e-5));

  const LinearizedModel lin = linearize(with_drive(p, d));
  CHECK(std::abs(lin.G - 0.5595) < 1e-8);
  CHECK(std::abs(lin.Delta_c - 1.251) < 1e-8);
  CHECK(std::abs(fixed_point_residual(with_drive(p, d), lin.Delta_c)) < 1e-10);
  CHECK(std::abs(std::abs(lin.alpha) - d.epsilon_c / std::hypot(p.kappa_c, lin.Delta_c)) < 1e-9);
  CHECK(lin.real_roots.size() == 3);
}

TEST_CASE("round trip over feasible targets") {
  const SystemParams p = reference_params();
  for (double G : {0.0, 0.1, 0.3, 0.5, 0.55}) {
    for (double D : {0.5, 1.0, 1.251, 2.0}) {
      if (G > 0.0 && 4.0 * G * G / D >= 0.999) continue;
      const DriveSetting d = target_drive(p, G, D);
      const LinearizedModel lin = linearize(with_drive(p, d));
      CHECK(std::abs(lin.G - G) <= 1e-8 * std::max(1.0, G));
      CHECK(std::abs(lin.Delta_c - D) <= 1e-8 * D);
    }
  }
}

TEST_CASE("G is nondecreasing in the drive at fixed detuning") {
  SystemParams p = reference_params();
  p.omega_ci = p.omega_c - 1.877081;
  double last = -1.0;
  for (double eps = 0.0; eps <= 700.0; eps += 25.0) {
    p.epsilon_c = eps;
    const double G = linearize(p).G;
    CHECK(G >= last);
    last = G;
  }
}

TEST_CASE("optical shift options") {
  SystemParams p = reference_params();
  p = with_drive(p, target_drive(p, 0.3, 1.251));
  LinearizeOptions printed;
  LinearizeOptions mech;
  mech.shift = OpticalShift::MechanicalDisplacement;
  const LinearizedModel a = linearize(p, printed);
  const LinearizedModel b = linearize(p, mech);
  const double k2 = p.kappa_c * p.kappa_c;
  const double expected =
      2.0 * p.g_c * p.g_c * p.epsilon_c * p.epsilon_c / (p.omega_b * (k2 + a.Delta_c * a.Delta_c));
  CHECK(p.omega_a - a.omega_a_tilde == doctest::Approx(expected).epsilon(1e-8));
  CHECK(b.omega_a_tilde == doctest::Approx(p.omega_a + 2.0 * p.g_a * b.beta.real()).epsilon(1e-12));
}

TEST_CASE("errors") {
  SystemParams p = reference_params();
  p.kappa_a = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  const SystemParams q = reference_params();
  CHECK_THROWS_AS(target_drive(q, 0.5, -1.0), Error);
  SystemParams z = reference_params();
  z.g_c = 0.0;
  try {
    target_drive(z, 0.1, 1.0);
    FAIL("expected infeasible target");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InfeasibleTarget);
  }
  const DriveSetting trivial = target_drive(q, 0.0, 1.0);
  CHECK(trivial.epsilon_c == 0.0);
  CHECK(trivial.delta_c == 1.0);
}
