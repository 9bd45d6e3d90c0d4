#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>

#include "quite/kernels.hpp"

namespace quite::kernels::detail {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;

inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_pd(lo, _mm_unpackhi_pd(lo, lo)));
}

// e^x for x clamped to [-708, 708]: Cody-Waite reduction plus a degree-13
// Taylor polynomial, ~1 ulp over the reduced range.
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2lo = _mm256_set1_pd(1.90821492927058770002e-10);
  x = _mm256_max_pd(_mm256_set1_pd(-708.0),
                    _mm256_min_pd(_mm256_set1_pd(708.0), x));
  __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2hi, x);
  r = _mm256_fnmadd_pd(k, ln2lo, r);
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
  __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  __m256i pow2 = _mm256_add_epi64(_mm256_slli_epi64(k64, 52),
                                  _mm256_castpd_si256(_mm256_set1_pd(1.0)));
  return _mm256_mul_pd(p, _mm256_castsi256_pd(pow2));
}

// Chebyshev coefficients of erfcx((1-t)/t) over t in [0,1], built once from
// std::erfc; keeps the vector path free of hand-copied coefficient tables.
constexpr int kChebN = 32;

struct ChebTable {
  double c[kChebN];
  ChebTable() {
    const double pi = 3.14159265358979323846;
    for (int k = 0; k < kChebN; ++k) {
      double s = 0.0;
      for (int j = 0; j < kChebN; ++j) {
        double th = pi * (j + 0.5) / kChebN;
        double t = 0.5 * (1.0 + std::cos(th));
        s += erfcx((1.0 - t) / t) * std::cos(k * th);
      }
      c[k] = 2.0 * s / kChebN;
    }
  }
};

const ChebTable& cheb() {
  static const ChebTable table;
  return table;
}

// Thurstone building blocks for two vectors at a time; the paired Clenshaw
// recurrences overlap and hide each other's latency.
//   h   = erfcx(|x|/sqrt2)
//   e   = exp(-x^2/2)
//   cm  = 1 - Phi(-|x|)  (the large half of the CDF split)
struct ThuParts8 {
  __m256d h0, h1, e0, e1, cm0, cm1;
};

inline ThuParts8 thu_parts8(__m256d x0, __m256d x1) {
  const double* c = cheb().c;
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d u0 = _mm256_mul_pd(abs_pd(x0), _mm256_set1_pd(kInvSqrt2));
  __m256d u1 = _mm256_mul_pd(abs_pd(x1), _mm256_set1_pd(kInvSqrt2));
  __m256d t0 = _mm256_div_pd(one, _mm256_add_pd(one, u0));
  __m256d t1 = _mm256_div_pd(one, _mm256_add_pd(one, u1));
  __m256d y0 = _mm256_fmsub_pd(_mm256_set1_pd(2.0), t0, one);
  __m256d y1 = _mm256_fmsub_pd(_mm256_set1_pd(2.0), t1, one);
  __m256d ty0 = _mm256_add_pd(y0, y0);
  __m256d ty1 = _mm256_add_pd(y1, y1);
  __m256d b1a = _mm256_setzero_pd(), b2a = _mm256_setzero_pd();
  __m256d b1b = _mm256_setzero_pd(), b2b = _mm256_setzero_pd();
  for (int k = kChebN - 1; k >= 1; --k) {
    __m256d ck = _mm256_set1_pd(c[k]);
    __m256d b0a = _mm256_sub_pd(_mm256_fmadd_pd(ty0, b1a, ck), b2a);
    __m256d b0b = _mm256_sub_pd(_mm256_fmadd_pd(ty1, b1b, ck), b2b);
    b2a = b1a; b1a = b0a;
    b2b = b1b; b1b = b0b;
  }
  ThuParts8 out;
  __m256d half_c0 = _mm256_set1_pd(0.5 * c[0]);
  out.h0 = _mm256_add_pd(half_c0,
                         _mm256_sub_pd(_mm256_mul_pd(y0, b1a), b2a));
  out.h1 = _mm256_add_pd(half_c0,
                         _mm256_sub_pd(_mm256_mul_pd(y1, b1b), b2b));
  out.h0 = _mm256_max_pd(out.h0, _mm256_set1_pd(1e-280));
  out.h1 = _mm256_max_pd(out.h1, _mm256_set1_pd(1e-280));
  out.e0 = exp4(_mm256_mul_pd(u0, _mm256_sub_pd(_mm256_setzero_pd(), u0)));
  out.e1 = exp4(_mm256_mul_pd(u1, _mm256_sub_pd(_mm256_setzero_pd(), u1)));
  const __m256d half = _mm256_set1_pd(0.5);
  out.cm0 = _mm256_fnmadd_pd(half, _mm256_mul_pd(out.e0, out.h0), one);
  out.cm1 = _mm256_fnmadd_pd(half, _mm256_mul_pd(out.e1, out.h1), one);
  return out;
}

// R(x) = phi/Phi: sqrt(2/pi)/h on the negative side, phi/(1-m) otherwise.
inline __m256d thu_ratio_lane(__m256d x, __m256d h, __m256d e, __m256d cm) {
  __m256d rneg = _mm256_div_pd(_mm256_set1_pd(kSqrt2OverPi), h);
  __m256d phi = _mm256_mul_pd(_mm256_set1_pd(kInvSqrt2Pi), e);
  __m256d rpos = _mm256_div_pd(phi, cm);
  __m256d neg = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ);
  return _mm256_blendv_pd(rpos, rneg, neg);
}

// --- BTL building blocks: t = e^{-|x|}, inv = 1/(1+t) ---------------------

struct BtlParts {
  __m256d t, inv, nonneg;
};

inline BtlParts btl_parts(__m256d x) {
  BtlParts p;
  p.t = exp4(_mm256_sub_pd(_mm256_setzero_pd(), abs_pd(x)));
  p.inv = _mm256_div_pd(_mm256_set1_pd(1.0),
                        _mm256_add_pd(_mm256_set1_pd(1.0), p.t));
  p.nonneg = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_GE_OQ);
  return p;
}

inline __m256d btl_ratio4(__m256d x) {
  BtlParts p = btl_parts(x);
  __m256d small = _mm256_mul_pd(p.t, p.inv);
  return _mm256_blendv_pd(p.inv, small, p.nonneg);
}

}  // namespace

double deriv_sum_avx2(ModelKind m, const double* s, std::size_t n, double t) {
  const __m256d tv = _mm256_set1_pd(t);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  if (m == ModelKind::Btl) {
    for (; i + 4 <= n; i += 4) {
      __m256d sv = _mm256_loadu_pd(s + i);
      acc = _mm256_fmadd_pd(sv, btl_ratio4(_mm256_mul_pd(sv, tv)), acc);
    }
  } else {
    for (; i + 8 <= n; i += 8) {
      __m256d s0 = _mm256_loadu_pd(s + i);
      __m256d s1 = _mm256_loadu_pd(s + i + 4);
      __m256d x0 = _mm256_mul_pd(s0, tv);
      __m256d x1 = _mm256_mul_pd(s1, tv);
      ThuParts8 p = thu_parts8(x0, x1);
      acc = _mm256_fmadd_pd(s0, thu_ratio_lane(x0, p.h0, p.e0, p.cm0), acc);
      acc = _mm256_fmadd_pd(s1, thu_ratio_lane(x1, p.h1, p.e1, p.cm1), acc);
    }
  }
  return hsum(acc) + deriv_sum_scalar(m, s + i, n - i, t);
}

double curvature_sum_avx2(ModelKind m, const double* s, std::size_t n,
                          double t) {
  const __m256d tv = _mm256_set1_pd(t);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  if (m == ModelKind::Btl) {
    for (; i + 4 <= n; i += 4) {
      __m256d sv = _mm256_loadu_pd(s + i);
      BtlParts p = btl_parts(_mm256_mul_pd(sv, tv));
      // C = -F(1-F) = -t/(1+t)^2, even in x
      __m256d c = _mm256_mul_pd(p.t, _mm256_mul_pd(p.inv, p.inv));
      acc = _mm256_fnmadd_pd(_mm256_mul_pd(sv, sv), c, acc);
    }
  } else {
    for (; i + 8 <= n; i += 8) {
      __m256d s0 = _mm256_loadu_pd(s + i);
      __m256d s1 = _mm256_loadu_pd(s + i + 4);
      __m256d x0 = _mm256_mul_pd(s0, tv);
      __m256d x1 = _mm256_mul_pd(s1, tv);
      ThuParts8 p = thu_parts8(x0, x1);
      __m256d r0 = thu_ratio_lane(x0, p.h0, p.e0, p.cm0);
      __m256d r1 = thu_ratio_lane(x1, p.h1, p.e1, p.cm1);
      // C = -R(x + R)
      __m256d c0 = _mm256_mul_pd(r0, _mm256_add_pd(x0, r0));
      __m256d c1 = _mm256_mul_pd(r1, _mm256_add_pd(x1, r1));
      acc = _mm256_fnmadd_pd(_mm256_mul_pd(s0, s0), c0, acc);
      acc = _mm256_fnmadd_pd(_mm256_mul_pd(s1, s1), c1, acc);
    }
  }
  return hsum(acc) + curvature_sum_scalar(m, s + i, n - i, t);
}

double fisher_sum_avx2(ModelKind m, const double* r, std::size_t n, double t) {
  const __m256d tv = _mm256_set1_pd(t);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  if (m == ModelKind::Btl) {
    for (; i + 4 <= n; i += 4) {
      __m256d rv = _mm256_loadu_pd(r + i);
      BtlParts p = btl_parts(_mm256_mul_pd(rv, tv));
      // g = R(x)R(-x) = F'(x) = t/(1+t)^2
      __m256d g = _mm256_mul_pd(p.t, _mm256_mul_pd(p.inv, p.inv));
      acc = _mm256_fmadd_pd(_mm256_mul_pd(rv, rv), g, acc);
    }
  } else {
    const __m256d k = _mm256_set1_pd(kSqrt2OverPi * kInvSqrt2Pi);
    for (; i + 8 <= n; i += 8) {
      __m256d r0 = _mm256_loadu_pd(r + i);
      __m256d r1 = _mm256_loadu_pd(r + i + 4);
      __m256d x0 = _mm256_mul_pd(r0, tv);
      __m256d x1 = _mm256_mul_pd(r1, tv);
      ThuParts8 p = thu_parts8(x0, x1);
      // g = sqrt(2/pi) phi(|x|) / (h (1-m)), even in x
      __m256d g0 = _mm256_div_pd(_mm256_mul_pd(k, p.e0),
                                 _mm256_mul_pd(p.h0, p.cm0));
      __m256d g1 = _mm256_div_pd(_mm256_mul_pd(k, p.e1),
                                 _mm256_mul_pd(p.h1, p.cm1));
      acc = _mm256_fmadd_pd(_mm256_mul_pd(r0, r0), g0, acc);
      acc = _mm256_fmadd_pd(_mm256_mul_pd(r1, r1), g1, acc);
    }
  }
  return hsum(acc) + fisher_sum_scalar(m, r + i, n - i, t);
}

void ratio_fill_avx2(ModelKind m, const double* x, std::size_t n, double* out) {
  std::size_t i = 0;
  if (m == ModelKind::Btl) {
    for (; i + 4 <= n; i += 4)
      _mm256_storeu_pd(out + i, btl_ratio4(_mm256_loadu_pd(x + i)));
  } else {
    for (; i + 8 <= n; i += 8) {
      __m256d x0 = _mm256_loadu_pd(x + i);
      __m256d x1 = _mm256_loadu_pd(x + i + 4);
      ThuParts8 p = thu_parts8(x0, x1);
      _mm256_storeu_pd(out + i, thu_ratio_lane(x0, p.h0, p.e0, p.cm0));
      _mm256_storeu_pd(out + i + 4, thu_ratio_lane(x1, p.h1, p.e1, p.cm1));
    }
  }
  ratio_fill_scalar(m, x + i, n - i, out + i);
}

}  // namespace quite::kernels::detail

#endif  // x86
