// Compiled with -mavx2 -mfma; only called after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "ndig/kernels.hpp"
#include "sincos_poly.hpp"

namespace ndig::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline void sincos4(__m256d x, __m256d& sin_out, __m256d& cos_out) {
  using namespace detail;
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPiOver2Hi), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPiOver2Lo), r);
  const __m256d z = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_set1_pd(kSin0);
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSin1));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSin2));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSin3));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSin4));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSin5));
  const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);

  __m256d pc = _mm256_set1_pd(kCos0);
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCos1));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCos2));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCos3));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCos4));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCos5));
  const __m256d c = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc,
                                    _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

  // Quadrant q = n mod 4: sin -> {s, c, -s, -c}, cos -> {c, -s, -c, s}.
  const __m256i q = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
  const __m256d sin_sign = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(q, two), 62));
  const __m256d cos_sign =
      _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(q, one), two), 62));
  sin_out = _mm256_xor_pd(_mm256_blendv_pd(s, c, swap), sin_sign);
  cos_out = _mm256_xor_pd(_mm256_blendv_pd(c, s, swap), cos_sign);
}

}  // namespace

CentralSums central_sums(std::span<const double> x) {
  CentralSums out;
  const std::size_t n = x.size();
  out.n = n;
  if (n == 0) return out;
  const double* p = x.data();
  const std::size_t n4 = n & ~std::size_t{3};

  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(p + i));
  double sum = hsum(acc);
  for (std::size_t i = n4; i < n; ++i) sum += p[i];
  out.mean = sum / static_cast<double>(n);

  const __m256d mean = _mm256_set1_pd(out.mean);
  __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd(), a4 = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + i), mean);
    const __m256d d2 = _mm256_mul_pd(d, d);
    a2 = _mm256_add_pd(a2, d2);
    a3 = _mm256_fmadd_pd(d2, d, a3);
    a4 = _mm256_fmadd_pd(d2, d2, a4);
  }
  out.m2 = hsum(a2);
  out.m3 = hsum(a3);
  out.m4 = hsum(a4);
  for (std::size_t i = n4; i < n; ++i) {
    const double d = p[i] - out.mean;
    const double d2 = d * d;
    out.m2 += d2;
    out.m3 += d2 * d;
    out.m4 += d2 * d2;
  }
  return out;
}

void ecf_sums(std::span<const double> x, std::span<const double> v, std::span<double> re, std::span<double> im) {
  const std::size_t n = x.size();
  const std::size_t n4 = n & ~std::size_t{3};
  const double* p = x.data();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const __m256d vk = _mm256_set1_pd(v[k]);
    __m256d ac = _mm256_setzero_pd();
    __m256d as = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n4; i += 4) {
      __m256d s, c;
      sincos4(_mm256_mul_pd(vk, _mm256_loadu_pd(p + i)), s, c);
      ac = _mm256_add_pd(ac, c);
      as = _mm256_add_pd(as, s);
    }
    double c = hsum(ac);
    double s = hsum(as);
    for (std::size_t i = n4; i < n; ++i) {
      const double arg = v[k] * p[i];
      c += std::cos(arg);
      s += std::sin(arg);
    }
    re[k] = c;
    im[k] = s;
  }
}

}  // namespace ndig::kernels::avx2
