#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "critkerr/kernels/kernels.hpp"

namespace critkerr::kernels {

namespace {

Backend initial_backend() {
  if (const char* env = std::getenv("CRITKERR_SIMD")) {
    if (std::string(env) == "scalar") return Backend::Scalar;
  }
  return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

}  // namespace

std::string_view backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available()) throw std::runtime_error("avx2 backend unavailable on this CPU");
  backend_slot().store(b, std::memory_order_relaxed);
}

std::complex<double> sum_exp_affine(std::complex<double> c0, ComplexSpan base, std::span<const ComplexSpan> basis,
                                    std::span<const std::complex<double>> coef, std::size_t n) {
  if (active_backend() == Backend::Scalar) return scalar::sum_exp_affine(c0, base, basis, coef, n);
  std::vector<const double*> re(basis.size()), im(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    re[j] = basis[j].re;
    im[j] = basis[j].im;
  }
  const double c[2] = {c0.real(), c0.imag()};
  double out[2];
  avx2::sum_exp_affine(c, base.re, base.im, re.data(), im.data(), reinterpret_cast<const double*>(coef.data()),
                       basis.size(), n, out);
  return {out[0], out[1]};
}

void displaced_parity_row(std::span<const std::complex<double>> psi, double y, std::span<const double> xs,
                          std::span<double> out) {
  if (active_backend() == Backend::Scalar) return scalar::displaced_parity_row(psi, y, xs, out);
  avx2::displaced_parity_row(reinterpret_cast<const double*>(psi.data()), psi.size(), y, xs.data(), xs.size(),
                             out.data());
}

}  // namespace critkerr::kernels
