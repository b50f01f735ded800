#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "critkerr/catstate.hpp"
#include "critkerr/error.hpp"
#include "critkerr/spectrum.hpp"

using namespace critkerr;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

double overlap2(const std::vector<cd>& a, const std::vector<cd>& b) {
  cd s = 0.0;
  for (std::size_t m = 0; m < std::min(a.size(), b.size()); ++m) s += std::conj(a[m]) * b[m];
  return std::norm(s);
}

double norm2(const std::vector<cd>& a) {
  double s = 0.0;
  for (const cd& v : a) s += std::norm(v);
  return s;
}

}  // namespace

TEST_CASE("amplitudes follow the Kerr phase formula") {
  const CatState s = evolve_cat(2.0, 0.125, 1, 40);
  CHECK(s.theta_K == doctest::Approx(2.0 * kPi * 0.125));
  CHECK(std::abs(norm2(s.amplitudes) - 1.0) < 1e-10);
  const std::vector<cd> coh = coherent_amplitudes(2.0, 40);
  for (int m = 0; m <= 40; ++m) {
    const cd expected = coh[m] * std::exp(cd(0.0, s.theta_K * m * m));
    CHECK(std::abs(s.amplitudes[m] - expected) < 1e-10);
  }
}

TEST_CASE("integer phase returns the coherent state") {
  const CatState s = evolve_cat(2.0, 3.0, 1, 40);
  CHECK(overlap2(s.amplitudes, coherent_amplitudes(2.0, 40)) > 1.0 - 1e-12);
  const Decomposition d = decompose_cat(s);
  CHECK(d.count == 1);
  CHECK(std::abs(d.components.front().phase) < 1e-12);
  CHECK(std::abs(d.components.front().weight - 1.0) < 1e-9);
}

TEST_CASE("half phase flips the amplitude") {
  const CatState s = evolve_cat(2.0, 0.5, 1, 40);
  CHECK(overlap2(s.amplitudes, coherent_amplitudes(-2.0, 40)) > 1.0 - 1e-10);
  const Decomposition d = decompose_cat(s);
  CHECK(d.count == 1);
}

TEST_CASE("quarter phase gives the two-component cat") {
  const CatState s = evolve_cat(2.0, 0.25, 1, 40);
  std::vector<cd> cat(41);
  const auto p = coherent_amplitudes(2.0, 40), m = coherent_amplitudes(-2.0, 40);
  for (int k = 0; k <= 40; ++k) cat[k] = ((1.0 + cd(0, 1)) * p[k] + (1.0 - cd(0, 1)) * m[k]) / 2.0;
  CHECK(overlap2(s.amplitudes, cat) > 0.999);
  const Decomposition d = decompose_cat(s);
  CHECK(d.count == 2);
  CHECK(d.residual < 1e-6);
}

TEST_CASE("decomposition of three and four components, with reconstruction") {
  struct Case {
    double theta;
    int count;
  };
  for (const Case c : {Case{2.0 * kPi / 3.0, 3}, Case{kPi / 4.0, 4}, Case{kPi / 2.0, 2}, Case{kPi, 1}}) {
    const CatState s = cat_from_phase(2.0, c.theta, 40);
    const Decomposition d = decompose_cat(s);
    CHECK(d.count == c.count);
    CHECK(d.residual < 1e-6);
    CHECK(d.fidelity > 0.999);
    const std::vector<cd> back = recombine(d, 2.0, 40);
    double err = 0.0;
    for (int m = 0; m <= 40; ++m) err += std::norm(back[m] - s.amplitudes[m]);
    CHECK(std::sqrt(err) < 1e-6);
  }
  const Decomposition three = decompose_cat(cat_from_phase(2.0, 2.0 * kPi / 3.0, 40));
  for (int k = 0; k < 3; ++k) CHECK(three.components[k].phase == doctest::Approx(2.0 * kPi * k / 3.0));
}

TEST_CASE("Gauss-sum component counts") {
  CHECK(component_count({0, 1}) == 1);
  CHECK(component_count({1, 2}) == 1);
  CHECK(component_count({1, 4}) == 2);
  CHECK(component_count({1, 3}) == 3);
  CHECK(component_count({1, 8}) == 4);
}

TEST_CASE("continued-fraction rational detection") {
  const auto r = rational_approx(0.3333333, 12, 1e-6);
  REQUIRE(r);
  CHECK(r->p == 1);
  CHECK(r->q == 3);
  CHECK_FALSE(rational_approx(std::numbers::sqrt2 - 1.0, 12, 1e-6));
  CHECK_THROWS_AS(decompose_cat(cat_from_phase(2.0, 2.0 * kPi * 0.1234567, 40)), Error);
}

TEST_CASE("small amplitudes cannot resolve many components") {
  try {
    decompose_cat(cat_from_phase(0.01, kPi / 4.0, 30));
    FAIL("expected unresolvable components");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnresolvableComponents);
  }
}

TEST_CASE("truncation rules") {
  CHECK_THROWS_AS(evolve_cat(4.0, 0.25, 1, 20), Error);
  const CatState s = evolve_cat(2.0, 0.25, 1, 40);
  CHECK(s.truncation_loss < 1e-8);
  CHECK(truncation_loss(2.0, 40) < 1e-12);
}

TEST_CASE("stroboscopic context: validity margin and the fast-mode toggle") {
  const NormalModes nm = diagonalize(0.5592, 1.251, 1.0, 1e-3);
  const PolaronFrame f = kerr_strength(nm, 1e-3, 0.5592, 1.251, 1.0);
  CatContext ctx;
  ctx.omega_minus = nm.omega_minus;
  ctx.kappa_max = 0.127;
  ctx.include_zeta_plus = true;
  ctx.zeta_plus = f.zeta_plus;
  ctx.omega_plus = nm.omega_plus;
  ctx.eta_plus = nm.g_plus * nm.g_plus / nm.omega_plus;
  const CatState s = evolve_cat(2.0, f.eta / nm.omega_minus, 1, 40, ctx);
  CHECK(s.validity_margin == doctest::Approx(0.127 * 2.0 * kPi / nm.omega_minus));
  CHECK(s.zeta_plus_fidelity > 0.999);
  CHECK(s.zeta_plus_fidelity <= 1.0 + 1e-12);
}

TEST_CASE("Wigner of the vacuum and of a coherent state") {
  const AxisSpec ax{-5.0, 5.0, 101};
  const WignerGrid vac = wigner(std::vector<cd>{1.0, 0.0}, ax, ax);
  CHECK(std::abs(vac.at(50, 50) - 1.0 / kPi) < 1e-8);
  CHECK(std::abs(vac.at(60, 45) - std::exp(-1.0 - 0.25) / kPi) < 1e-10);
  CHECK(std::abs(vac.normalization - 1.0) < 1e-3);

  const AxisSpec wide{-7.0, 7.0, 141};
  const WignerGrid coh = wigner(cat_from_phase(2.0, 0.0, 40), wide, wide);
  std::size_t best = 0;
  for (std::size_t i = 1; i < coh.values.size(); ++i)
    if (coh.values[i] > coh.values[best]) best = i;
  const double x = coh.x_axis[best % 141], y = coh.y_axis[best / 141];
  CHECK(std::abs(x - 2.0 * std::numbers::sqrt2) < 0.1);
  CHECK(std::abs(y) < 0.1);
}

TEST_CASE("Wigner of the two-component cat: lobes, fringes, parity and normalization") {
  const AxisSpec ax{-7.0, 7.0, 141};
  const CatState s = cat_from_phase(2.0, kPi / 2.0, 40);
  const WignerGrid w = wigner(s, ax, ax, 2);
  CHECK(std::abs(w.normalization - 1.0) < 1e-3);
  CHECK(w.min_value <= -0.05);
  double parity = 0.0;
  for (std::size_t m = 0; m < s.amplitudes.size(); ++m) parity += (m % 2 ? -1.0 : 1.0) * std::norm(s.amplitudes[m]);
  CHECK(std::abs(w.at(70, 70) - parity / kPi) < 1e-6);
  // lobes sit at x = +-2 sqrt 2 on the x axis
  const std::size_t right = 70 + 28, left = 70 - 28;
  // each lobe of an equal-weight two-component cat peaks at 1/(2 pi)
  CHECK(w.at(right, 70) == doctest::Approx(0.5 / kPi).epsilon(1e-3));
  CHECK(w.at(left, 70) == doctest::Approx(0.5 / kPi).epsilon(1e-3));
  CHECK(w.at(70, right) < 0.05);

  const WignerGrid serial = wigner(s, ax, ax, 1);
  CHECK(serial.values == w.values);
}

TEST_CASE("Wigner coverage rule and coarse-grid warning") {
  const CatState s = cat_from_phase(2.0, kPi / 2.0, 40);
  CHECK_THROWS_AS(wigner(s, AxisSpec{-3.0, 3.0, 61}, AxisSpec{-3.0, 3.0, 61}), Error);
  const WignerGrid coarse = wigner(s, AxisSpec{-7.0, 7.0, 21}, AxisSpec{-7.0, 7.0, 21});
  CHECK_FALSE(coarse.warnings.empty());
}

TEST_CASE("regime map flags and counts") {
  SystemParams p;
  const double D = 1.251;
  const double Gcp = critical_point(D);
  std::vector<double> Gs{0.3, Gcp * (1.0 + 1e-6)};
  RegimeMapOptions o;
  const auto cells = cat_regime_map(Gs, {D}, p, o);
  REQUIRE(cells.size() == 2);
  // weak coupling: eta / omega_- ~ 1e-6 rounds to the trivial phase 0/1
  REQUIRE(cells[0].count);
  CHECK(*cells[0].count == 1);
  CHECK(cells[0].fraction->q == 1);
  CHECK(cells[1].flag == "unstable");

  // locate G with eta / omega_- = 1/4 by bisection and check the count
  double lo = 0.5, hi = Gcp * (1.0 - 1e-7);
  auto ratio = [&](double G) {
    const NormalModes nm = diagonalize(G, D, 1.0, p.g_a);
    return kerr_eta(p.g_a, G, D) / nm.omega_minus;
  };
  auto solve = [&](double target) {
    double a = lo, b = hi;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (a + b);
      (ratio(mid) < target ? a : b) = mid;
    }
    return 0.5 * (a + b);
  };
  // 0.133 is more than 1e-3 from every p/q with q <= 12
  const auto off = cat_regime_map({solve(0.133)}, {D}, p, o);
  CHECK(off.front().flag == "non-stroboscopic");
  CHECK_FALSE(off.front().count);
  const auto hit = cat_regime_map({solve(0.25)}, {D}, p, o);
  REQUIRE(hit.front().count);
  CHECK(*hit.front().count == 2);
  CHECK(hit.front().fraction->q == 4);
}
