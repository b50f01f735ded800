#include <cmath>
#include <numbers>
#include <vector>

#include "critkerr/kernels/kernels.hpp"

namespace critkerr::kernels::scalar {

std::complex<double> sum_exp_affine(std::complex<double> c0, ComplexSpan base, std::span<const ComplexSpan> basis,
                                    std::span<const std::complex<double>> coef, std::size_t n) {
  std::complex<double> acc{};
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> z = c0 + std::complex<double>(base.re[k], base.im[k]);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      z += coef[j] * std::complex<double>(basis[j].re[k], basis[j].im[k]);
    }
    acc += std::exp(z);
  }
  return acc;
}

void displaced_parity_row(std::span<const std::complex<double>> psi, double y, std::span<const double> xs,
                          std::span<double> out) {
  const std::size_t N = psi.size();
  std::vector<double> root(N + 1);
  for (std::size_t n = 0; n <= N; ++n) root[n] = std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::complex<double> gamma = std::complex<double>(xs[i], y) * std::numbers::sqrt2;
    const double x = std::norm(gamma), r = std::abs(gamma);
    const std::complex<double> phase = r > 0.0 ? gamma / r : std::complex<double>(1.0);
    // <n+k|D(gamma)|n> = e^{ik arg gamma} u_n^k with
    // u_n^k = e^{-x/2} r^k sqrt(n!/(n+k)!) L_n^k(x), x = r^2
    std::complex<double> rot = 1.0;
    double u0 = std::exp(-0.5 * x);
    double w = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      if (k > 0) {
        u0 *= r / root[k];
        rot *= phase;
      }
      std::complex<double> sum{};
      double prev = 0.0, u = u0;
      for (std::size_t n = 0; n + k < N; ++n) {
        sum += (n % 2 == 0 ? u : -u) * (std::conj(psi[n + k]) * psi[n]);
        const double next = ((2.0 * static_cast<double>(n) + 1.0 + static_cast<double>(k) - x) * u -
                             root[n] * root[n + k] * prev) /
                            (root[n + 1] * root[n + 1 + k]);
        prev = u;
        u = next;
      }
      w += k == 0 ? sum.real() : 2.0 * (rot * sum).real();
    }
    out[i] = w / std::numbers::pi;
  }
}

}  // namespace critkerr::kernels::scalar
