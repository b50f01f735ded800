#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace critkerr::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);
bool avx2_available();

/// Backend used by the dispatching entry points. Chosen on first use: AVX2
/// when the CPU has AVX2+FMA, unless CRITKERR_SIMD=scalar is set.
Backend active_backend();
void set_backend(Backend b);  // throws if the backend is unavailable

/// Structure-of-arrays view of n complex numbers.
struct ComplexSpan {
  const double* re = nullptr;
  const double* im = nullptr;
};

/// sum_k exp(c0 + base[k] + sum_j coef[j] * basis[j][k]), k in [0, n).
std::complex<double> sum_exp_affine(std::complex<double> c0, ComplexSpan base, std::span<const ComplexSpan> basis,
                                    std::span<const std::complex<double>> coef, std::size_t n);

/// Wigner values along one row of phase space via displaced parity:
///   out[i] = (1/pi) <psi| D(alpha_i) P D(alpha_i)^dag |psi> = (1/pi) <psi| D(2 alpha_i) P |psi>,
///   alpha_i = (xs[i] + i y) / sqrt(2), P the parity operator.
void displaced_parity_row(std::span<const std::complex<double>> psi, double y, std::span<const double> xs,
                          std::span<double> out);

// Direct access to each implementation, used by the equivalence tests.
namespace scalar {
std::complex<double> sum_exp_affine(std::complex<double> c0, ComplexSpan base, std::span<const ComplexSpan> basis,
                                    std::span<const std::complex<double>> coef, std::size_t n);
void displaced_parity_row(std::span<const std::complex<double>> psi, double y, std::span<const double> xs,
                          std::span<double> out);
}  // namespace scalar

namespace avx2 {
// Raw-array entry points; the translation unit is compiled with -mavx2 -mfma
// and must only be reached after avx2_available() returned true.
void sum_exp_affine(const double* c0, const double* base_re, const double* base_im, const double* const* basis_re,
                    const double* const* basis_im, const double* coef, std::size_t nbasis, std::size_t n,
                    double* result);
void displaced_parity_row(const double* psi, std::size_t n_fock, double y, const double* xs, std::size_t nx,
                          double* out);
void exp_sincos(const double* x, const double* y, std::size_t n, double* exp_x, double* sin_y, double* cos_y);
}  // namespace avx2

}  // namespace critkerr::kernels
