// AArch64 Advanced SIMD variants (two double lanes per register).

#include <arm_neon.h>

#include <cmath>

#include "ndig/kernels.hpp"
#include "sincos_poly.hpp"

namespace ndig::kernels::neon {

namespace {

inline void sincos2(float64x2_t x, float64x2_t& sin_out, float64x2_t& cos_out) {
  using namespace detail;
  const float64x2_t n = vrndnq_f64(vmulq_n_f64(x, kTwoOverPi));
  float64x2_t r = vfmsq_f64(x, n, vdupq_n_f64(kPiOver2Hi));
  r = vfmsq_f64(r, n, vdupq_n_f64(kPiOver2Lo));
  const float64x2_t z = vmulq_f64(r, r);

  float64x2_t ps = vdupq_n_f64(kSin0);
  ps = vfmaq_f64(vdupq_n_f64(kSin1), ps, z);
  ps = vfmaq_f64(vdupq_n_f64(kSin2), ps, z);
  ps = vfmaq_f64(vdupq_n_f64(kSin3), ps, z);
  ps = vfmaq_f64(vdupq_n_f64(kSin4), ps, z);
  ps = vfmaq_f64(vdupq_n_f64(kSin5), ps, z);
  const float64x2_t s = vfmaq_f64(r, vmulq_f64(r, z), ps);

  float64x2_t pc = vdupq_n_f64(kCos0);
  pc = vfmaq_f64(vdupq_n_f64(kCos1), pc, z);
  pc = vfmaq_f64(vdupq_n_f64(kCos2), pc, z);
  pc = vfmaq_f64(vdupq_n_f64(kCos3), pc, z);
  pc = vfmaq_f64(vdupq_n_f64(kCos4), pc, z);
  pc = vfmaq_f64(vdupq_n_f64(kCos5), pc, z);
  const float64x2_t c = vfmaq_f64(vfmsq_f64(vdupq_n_f64(1.0), vdupq_n_f64(0.5), z), vmulq_f64(z, z), pc);

  const int64x2_t q = vcvtq_s64_f64(n);
  const int64x2_t one = vdupq_n_s64(1);
  const int64x2_t two = vdupq_n_s64(2);
  const uint64x2_t swap = vceqq_s64(vandq_s64(q, one), one);
  const uint64x2_t sin_sign = vshlq_n_u64(vreinterpretq_u64_s64(vandq_s64(q, two)), 62);
  const uint64x2_t cos_sign = vshlq_n_u64(vreinterpretq_u64_s64(vandq_s64(vaddq_s64(q, one), two)), 62);
  sin_out = vreinterpretq_f64_u64(veorq_u64(vreinterpretq_u64_f64(vbslq_f64(swap, c, s)), sin_sign));
  cos_out = vreinterpretq_f64_u64(veorq_u64(vreinterpretq_u64_f64(vbslq_f64(swap, s, c)), cos_sign));
}

}  // namespace

CentralSums central_sums(std::span<const double> x) {
  CentralSums out;
  const std::size_t n = x.size();
  out.n = n;
  if (n == 0) return out;
  const double* p = x.data();
  const std::size_t n2 = n & ~std::size_t{1};

  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n2; i += 2) acc = vaddq_f64(acc, vld1q_f64(p + i));
  double sum = vaddvq_f64(acc);
  if (n2 < n) sum += p[n2];
  out.mean = sum / static_cast<double>(n);

  const float64x2_t mean = vdupq_n_f64(out.mean);
  float64x2_t a2 = vdupq_n_f64(0.0), a3 = vdupq_n_f64(0.0), a4 = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n2; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(p + i), mean);
    const float64x2_t d2 = vmulq_f64(d, d);
    a2 = vaddq_f64(a2, d2);
    a3 = vfmaq_f64(a3, d2, d);
    a4 = vfmaq_f64(a4, d2, d2);
  }
  out.m2 = vaddvq_f64(a2);
  out.m3 = vaddvq_f64(a3);
  out.m4 = vaddvq_f64(a4);
  if (n2 < n) {
    const double d = p[n2] - out.mean;
    out.m2 += d * d;
    out.m3 += d * d * d;
    out.m4 += d * d * d * d;
  }
  return out;
}

void ecf_sums(std::span<const double> x, std::span<const double> v, std::span<double> re, std::span<double> im) {
  const std::size_t n = x.size();
  const std::size_t n2 = n & ~std::size_t{1};
  const double* p = x.data();
  for (std::size_t k = 0; k < v.size(); ++k) {
    float64x2_t ac = vdupq_n_f64(0.0);
    float64x2_t as = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n2; i += 2) {
      float64x2_t s, c;
      sincos2(vmulq_n_f64(vld1q_f64(p + i), v[k]), s, c);
      ac = vaddq_f64(ac, c);
      as = vaddq_f64(as, s);
    }
    double c = vaddvq_f64(ac);
    double s = vaddvq_f64(as);
    if (n2 < n) {
      c += std::cos(v[k] * p[n2]);
      s += std::sin(v[k] * p[n2]);
    }
    re[k] = c;
    im[k] = s;
  }
}

}  // namespace ndig::kernels::neon
