#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "critkerr/kernels/kernels.hpp"

using namespace critkerr::kernels;
using cd = std::complex<double>;

namespace {

struct AffineCase {
  std::size_t n = 0;
  std::vector<double> base_re, base_im;
  std::vector<std::vector<double>> b_re, b_im;
  std::vector<ComplexSpan> basis;
  std::vector<cd> coef;
  cd c0;

  AffineCase(std::size_t n_, std::size_t nb, double decay, double phase, unsigned seed) : n(n_) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    base_re.resize(n);
    base_im.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      base_re[k] = -decay * std::abs(u(rng));
      base_im[k] = phase * u(rng);
    }
    b_re.assign(nb, std::vector<double>(n));
    b_im.assign(nb, std::vector<double>(n));
    for (std::size_t j = 0; j < nb; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        b_re[j][k] = 0.5 * u(rng);
        b_im[j][k] = 0.5 * u(rng);
      }
      basis.push_back({b_re[j].data(), b_im[j].data()});
      coef.emplace_back(0.3 * u(rng), 2.0 * u(rng));
    }
    c0 = cd(-0.2, 0.7);
  }
  ComplexSpan base() const { return {base_re.data(), base_im.data()}; }
};

cd reference_sum(const AffineCase& c) {
  cd s = 0.0;
  for (std::size_t k = 0; k < c.n; ++k) {
    cd e = c.c0 + cd(c.base_re[k], c.base_im[k]);
    for (std::size_t j = 0; j < c.basis.size(); ++j) e += c.coef[j] * cd(c.b_re[j][k], c.b_im[j][k]);
    s += std::exp(e);
  }
  return s;
}

}  // namespace

TEST_CASE("scalar exp-affine sum matches the direct formula") {
  for (std::size_t n : {1u, 3u, 4u, 17u, 1000u}) {
    const AffineCase c(n, 3, 5.0, 20.0, 7 + n);
    const cd got = scalar::sum_exp_affine(c.c0, c.base(), c.basis, c.coef, n);
    const cd ref = reference_sum(c);
    CHECK(std::abs(got - ref) <= 1e-13 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("AVX2 exp-affine sum is equivalent to scalar") {
  if (!avx2_available()) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  for (std::size_t n : {1u, 2u, 5u, 8u, 13u, 64u, 1001u, 4096u}) {
    for (double phase : {0.5, 50.0, 5e4}) {
      const AffineCase c(n, 4, 30.0, phase, 99 + n);
      const cd s = scalar::sum_exp_affine(c.c0, c.base(), c.basis, c.coef, n);
      double c0[2] = {c.c0.real(), c.c0.imag()};
      std::vector<const double*> bre, bim;
      std::vector<double> coef;
      for (std::size_t j = 0; j < c.basis.size(); ++j) {
        bre.push_back(c.basis[j].re);
        bim.push_back(c.basis[j].im);
        coef.push_back(c.coef[j].real());
        coef.push_back(c.coef[j].imag());
      }
      double out[2];
      avx2::sum_exp_affine(c0, c.base_re.data(), c.base_im.data(), bre.data(), bim.data(), coef.data(),
                           c.basis.size(), n, out);
      // each term carries the rounding of its exponent: |e^z| (1 + |z|) eps
      double scale = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        cd z = c.c0 + cd(c.base_re[k], c.base_im[k]);
        for (std::size_t j = 0; j < c.basis.size(); ++j) z += c.coef[j] * cd(c.b_re[j][k], c.b_im[j][k]);
        scale += std::exp(z.real()) * (1.0 + std::abs(z));
      }
      CHECK(std::abs(cd(out[0], out[1]) - s) <= 1e-15 * scale);
    }
  }
}

TEST_CASE("AVX2 exp and sincos primitives") {
  if (!avx2_available()) return;
  std::vector<double> x, y;
  for (int i = -800; i <= 800; ++i) x.push_back(i * 0.9137);
  for (std::size_t i = 0; i < x.size(); ++i) y.push_back((static_cast<double>(i) - 800.0) * 7.31);
  y.push_back(1e5 + 0.123);
  x.push_back(-1.0);
  std::vector<double> e(x.size()), s(x.size()), c(x.size());
  avx2::exp_sincos(x.data(), y.data(), x.size(), e.data(), s.data(), c.data());
  double worst_exp = 0.0, worst_trig = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ref = std::exp(x[i]);
    if (x[i] > -700.0 && x[i] < 700.0) worst_exp = std::max(worst_exp, std::abs(e[i] - ref) / ref);
    else if (x[i] <= -709.0) CHECK(e[i] == 0.0);
    worst_trig = std::max({worst_trig, std::abs(s[i] - std::sin(y[i])), std::abs(c[i] - std::cos(y[i]))});
  }
  CHECK(worst_exp < 4e-16);
  CHECK(worst_trig < 4e-16);
}

TEST_CASE("displaced parity row: vacuum and equivalence") {
  std::vector<double> xs;
  for (int i = 0; i < 37; ++i) xs.push_back(-6.0 + i / 3.0);
  std::vector<double> out(xs.size());
  const std::vector<cd> vac{1.0, 0.0, 0.0};
  scalar::displaced_parity_row(vac, 0.4, xs, out);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double ref = std::exp(-xs[i] * xs[i] - 0.16) / std::numbers::pi;
    CHECK(std::abs(out[i] - ref) < 1e-12);
  }

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<cd> psi(41);
  double norm = 0.0;
  for (auto& v : psi) {
    v = cd(g(rng), g(rng)) * std::exp(-0.05 * static_cast<double>(&v - psi.data()));
    norm += std::norm(v);
  }
  for (auto& v : psi) v /= std::sqrt(norm);
  std::vector<double> ref(xs.size());
  scalar::displaced_parity_row(psi, -1.3, xs, ref);
  if (avx2_available()) {
    std::vector<double> fast(xs.size());
    avx2::displaced_parity_row(reinterpret_cast<const double*>(psi.data()), psi.size(), -1.3, xs.data(), xs.size(),
                               fast.data());
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(fast[i] - ref[i]) < 1e-13);
  }
  // W(0, 0) is the parity expectation over pi
  std::vector<double> zero{0.0}, w0(1);
  scalar::displaced_parity_row(psi, 0.0, zero, w0);
  double parity = 0.0;
  for (std::size_t m = 0; m < psi.size(); ++m) parity += (m % 2 ? -1.0 : 1.0) * std::norm(psi[m]);
  CHECK(std::abs(w0[0] - parity / std::numbers::pi) < 1e-12);
}

TEST_CASE("dispatch honours the requested backend") {
  const Backend initial = active_backend();
  set_backend(Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  const AffineCase c(100, 2, 3.0, 4.0, 11);
  const cd a = sum_exp_affine(c.c0, c.base(), c.basis, c.coef, c.n);
  if (avx2_available()) {
    set_backend(Backend::Avx2);
    const cd b = sum_exp_affine(c.c0, c.base(), c.basis, c.coef, c.n);
    CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
  } else {
    CHECK_THROWS(set_backend(Backend::Avx2));
  }
  set_backend(initial);
  CHECK(backend_name(Backend::Scalar) == "scalar");
}

TEST_CASE("displaced parity row matches an exactly displaced state far from the origin") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const int N = 60, M = 400;
  std::vector<cd> psi(N);
  double norm = 0.0;
  for (int m = 0; m < N; ++m) {
    psi[m] = cd(g(rng), g(rng)) * std::exp(-0.04 * m);
    norm += std::norm(psi[m]);
  }
  for (auto& v : psi) v /= std::sqrt(norm);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(M, M);
  for (int i = 1; i < M; ++i) a(i - 1, i) = std::sqrt(static_cast<double>(i));
  Eigen::VectorXcd p = Eigen::VectorXcd::Zero(M);
  for (int m = 0; m < N; ++m) p[m] = psi[m];
  const double y = 4.5;
  const std::vector<double> xs{-8.0, -5.0, -1.0, 0.0, 3.0, 7.5};
  std::vector<double> w(xs.size());
  scalar::displaced_parity_row(psi, y, xs, w);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const cd alpha = cd(xs[i], y) / std::numbers::sqrt2;
    const Eigen::MatrixXcd gen = -alpha * a.adjoint() + std::conj(alpha) * a;
    const Eigen::MatrixXcd D = gen.exp();
    const Eigen::VectorXcd q = D * p;
    double exact = 0.0;
    for (int k = 0; k < M; ++k) exact += (k % 2 ? -1.0 : 1.0) * std::norm(q[k]);
    CHECK(std::abs(w[i] - exact / std::numbers::pi) < 1e-13);
  }
}
