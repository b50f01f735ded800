// AVX2 + FMA variants. Compiled with -mavx2 -mfma; only reached through the
// dispatcher after a CPU check. Keep this file free of std:: inline templates
// that could be merged with their non-AVX instantiations at link time.
#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "critkerr/kernels/kernels.hpp"

namespace critkerr::kernels::avx2 {

namespace {

constexpr double kLog2e = 1.4426950408889634;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kTwoOverPi = 6.36619772367581382433e-01;
// pi/2 split into 33-bit pieces (fdlibm), so k * piece is exact for |k| < 2^20.
constexpr double kPio2_1 = 1.57079632673412561417e+00;
constexpr double kPio2_2 = 6.07710050630396597660e-11;
constexpr double kPio2_3 = 2.02226624871116645580e-21;
constexpr double kMagic = 6755399441055744.0;  // 1.5 * 2^52
constexpr double kPi = 3.14159265358979323846;

inline __m256d exp_pd(__m256d x) {
  const __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(-708.0), _CMP_LT_OQ);
  x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
  x = _mm256_min_pd(x, _mm256_set1_pd(709.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Hi), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Lo), r);
  // Taylor series to r^13 on |r| <= ln2/2.
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  // 2^n via the exponent field.
  const __m256i bits = _mm256_castpd_si256(_mm256_add_pd(n, _mm256_set1_pd(kMagic + 1023.0)));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(bits, 52));
  return _mm256_andnot_pd(underflow, _mm256_mul_pd(p, scale));
}

inline void sincos_pd(__m256d y, __m256d* s_out, __m256d* c_out) {
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(kTwoOverPi)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2_1), y);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2_2), r);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2_3), r);
  const __m256d r2 = _mm256_mul_pd(r, r);

  // sin(r) = r (1 - r^2/3! + ... - r^16/17!)
  __m256d ps = _mm256_set1_pd(1.0 / 355687428096000.0);
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 1307674368000.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 6227020800.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 39916800.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 362880.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 5040.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 120.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 6.0));
  ps = _mm256_mul_pd(ps, r2);
  const __m256d sn = _mm256_fmadd_pd(ps, r, r);

  // cos(r) = 1 - r^2/2! + ... + r^16/16!
  __m256d pc = _mm256_set1_pd(1.0 / 20922789888000.0);
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 87178291200.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 479001600.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 3628800.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 40320.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 720.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 24.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-0.5));
  const __m256d cs = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0));

  // Quadrant from the low bits of k.
  const __m256i q = _mm256_castpd_si256(_mm256_add_pd(k, _mm256_set1_pd(kMagic)));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
  const __m256d sin_neg = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, two), two));
  const __m256d cos_neg = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(q, one), two), two));
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d s = _mm256_blendv_pd(sn, cs, swap);
  __m256d c = _mm256_blendv_pd(cs, sn, swap);
  s = _mm256_xor_pd(s, _mm256_and_pd(sin_neg, sign));
  c = _mm256_xor_pd(c, _mm256_and_pd(cos_neg, sign));
  *s_out = s;
  *c_out = c;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Above this phase magnitude the three-piece reduction loses accuracy.
constexpr double kMaxPhase = 1.0e6;

}  // namespace

void exp_sincos(const double* x, const double* y, std::size_t n, double* exp_x, double* sin_y, double* cos_y) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d s, c;
    sincos_pd(_mm256_loadu_pd(y + k), &s, &c);
    _mm256_storeu_pd(exp_x + k, exp_pd(_mm256_loadu_pd(x + k)));
    _mm256_storeu_pd(sin_y + k, s);
    _mm256_storeu_pd(cos_y + k, c);
  }
  for (; k < n; ++k) {
    exp_x[k] = std::exp(x[k]);
    sin_y[k] = std::sin(y[k]);
    cos_y[k] = std::cos(y[k]);
  }
}

void sum_exp_affine(const double* c0, const double* base_re, const double* base_im, const double* const* basis_re,
                    const double* const* basis_im, const double* coef, std::size_t nbasis, std::size_t n,
                    double* result) {
  const __m256d c0r = _mm256_set1_pd(c0[0]);
  const __m256d c0i = _mm256_set1_pd(c0[1]);
  __m256d acc_r = _mm256_setzero_pd();
  __m256d acc_i = _mm256_setzero_pd();
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  double tail_r = 0.0, tail_i = 0.0;

  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d zr = _mm256_add_pd(c0r, _mm256_loadu_pd(base_re + k));
    __m256d zi = _mm256_add_pd(c0i, _mm256_loadu_pd(base_im + k));
    for (std::size_t j = 0; j < nbasis; ++j) {
      const __m256d cr = _mm256_set1_pd(coef[2 * j]);
      const __m256d ci = _mm256_set1_pd(coef[2 * j + 1]);
      const __m256d br = _mm256_loadu_pd(basis_re[j] + k);
      const __m256d bi = _mm256_loadu_pd(basis_im[j] + k);
      zr = _mm256_fmadd_pd(cr, br, zr);
      zr = _mm256_fnmadd_pd(ci, bi, zr);
      zi = _mm256_fmadd_pd(cr, bi, zi);
      zi = _mm256_fmadd_pd(ci, br, zi);
    }
    const __m256d big = _mm256_cmp_pd(_mm256_and_pd(zi, abs_mask), _mm256_set1_pd(kMaxPhase), _CMP_GT_OQ);
    if (_mm256_movemask_pd(big) != 0) {
      alignas(32) double rr[4], ii[4];
      _mm256_store_pd(rr, zr);
      _mm256_store_pd(ii, zi);
      for (int l = 0; l < 4; ++l) {
        const double e = std::exp(rr[l]);
        tail_r += e * std::cos(ii[l]);
        tail_i += e * std::sin(ii[l]);
      }
      continue;
    }
    const __m256d e = exp_pd(zr);
    __m256d s, c;
    sincos_pd(zi, &s, &c);
    acc_r = _mm256_fmadd_pd(e, c, acc_r);
    acc_i = _mm256_fmadd_pd(e, s, acc_i);
  }
  for (; k < n; ++k) {
    double zr = c0[0] + base_re[k];
    double zi = c0[1] + base_im[k];
    for (std::size_t j = 0; j < nbasis; ++j) {
      zr += coef[2 * j] * basis_re[j][k] - coef[2 * j + 1] * basis_im[j][k];
      zi += coef[2 * j] * basis_im[j][k] + coef[2 * j + 1] * basis_re[j][k];
    }
    const double e = std::exp(zr);
    tail_r += e * std::cos(zi);
    tail_i += e * std::sin(zi);
  }
  result[0] = hsum(acc_r) + tail_r;
  result[1] = hsum(acc_i) + tail_i;
}

void displaced_parity_row(const double* psi, std::size_t n_fock, double y, const double* xs, std::size_t nx,
                          double* out) {
  const std::size_t N = n_fock;
  std::vector<double> root(N + 1);
  for (std::size_t n = 0; n <= N; ++n) root[n] = std::sqrt(static_cast<double>(n));
  const double sqrt2 = 1.41421356237309504880;

  for (std::size_t i0 = 0; i0 < nx; i0 += 4) {
    // Four x values per lane group; the recurrence coefficients are shared.
    alignas(32) double xv[4], rv[4], pr[4], pi[4], u0v[4];
    for (std::size_t l = 0; l < 4; ++l) {
      const double gx = ((i0 + l < nx) ? xs[i0 + l] : xs[i0]) * sqrt2, gy = y * sqrt2;
      xv[l] = gx * gx + gy * gy;
      rv[l] = std::sqrt(xv[l]);
      pr[l] = rv[l] > 0.0 ? gx / rv[l] : 1.0;
      pi[l] = rv[l] > 0.0 ? gy / rv[l] : 0.0;
      u0v[l] = std::exp(-0.5 * xv[l]);
    }
    const __m256d X = _mm256_load_pd(xv), R = _mm256_load_pd(rv);
    const __m256d phr = _mm256_load_pd(pr), phi = _mm256_load_pd(pi);
    __m256d u0 = _mm256_load_pd(u0v);
    __m256d rot_r = _mm256_set1_pd(1.0), rot_i = _mm256_setzero_pd();
    __m256d w = _mm256_setzero_pd();

    for (std::size_t k = 0; k < N; ++k) {
      if (k > 0) {
        u0 = _mm256_mul_pd(u0, _mm256_div_pd(R, _mm256_set1_pd(root[k])));
        const __m256d nr = _mm256_fmsub_pd(rot_r, phr, _mm256_mul_pd(rot_i, phi));
        rot_i = _mm256_fmadd_pd(rot_r, phi, _mm256_mul_pd(rot_i, phr));
        rot_r = nr;
      }
      __m256d sr = _mm256_setzero_pd(), si = _mm256_setzero_pd();
      __m256d prev = _mm256_setzero_pd(), u = u0;
      for (std::size_t n = 0; n + k < N; ++n) {
        // sign * conj(psi[n+k]) psi[n]
        const double ar = psi[2 * (n + k)], ai = psi[2 * (n + k) + 1];
        const double br = psi[2 * n], bi = psi[2 * n + 1];
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        sr = _mm256_fmadd_pd(_mm256_set1_pd(sgn * (ar * br + ai * bi)), u, sr);
        si = _mm256_fmadd_pd(_mm256_set1_pd(sgn * (ar * bi - ai * br)), u, si);
        const __m256d a = _mm256_sub_pd(
            _mm256_set1_pd(2.0 * static_cast<double>(n) + 1.0 + static_cast<double>(k)), X);
        const __m256d next =
            _mm256_div_pd(_mm256_fnmadd_pd(_mm256_set1_pd(root[n] * root[n + k]), prev, _mm256_mul_pd(a, u)),
                          _mm256_set1_pd(root[n + 1] * root[n + 1 + k]));
        prev = u;
        u = next;
      }
      if (k == 0) {
        w = _mm256_add_pd(w, sr);
      } else {
        const __m256d re = _mm256_fmsub_pd(rot_r, sr, _mm256_mul_pd(rot_i, si));
        w = _mm256_fmadd_pd(_mm256_set1_pd(2.0), re, w);
      }
    }
    alignas(32) double wv[4];
    _mm256_store_pd(wv, _mm256_div_pd(w, _mm256_set1_pd(kPi)));
    for (std::size_t l = 0; l < 4 && i0 + l < nx; ++l) out[i0 + l] = wv[l];
  }
}

}  // namespace critkerr::kernels::avx2
