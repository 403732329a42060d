// AVX2 kernel variants. Compiled with -mavx2 (no -mfma: the elementwise
// kernels must round exactly like the scalar reference, so mul/add stay
// separate operations on both paths).

#if defined(__x86_64__) || defined(_M_X64)

#include "uavsim/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <immintrin.h>
#include <limits>

namespace uavsim::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

// Natural log for positive finite lanes, fdlibm-style: split x into
// 2^k * (1+f) with 1+f in [sqrt(1/2), sqrt(2)), then the standard
// polynomial in s = f/(2+f). Accuracy ~1 ulp, verified against
// std::log in the kernel tests.
inline __m256d log_pd(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);

  // Rescale subnormals so the exponent-field split below is valid.
  const __m256d min_norm = _mm256_set1_pd(2.2250738585072014e-308);
  const __m256d is_sub = _mm256_cmp_pd(x, min_norm, _CMP_LT_OQ);
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, _mm256_set1_pd(0x1p54)), is_sub);
  const __m256d k_bias = _mm256_and_pd(is_sub, _mm256_set1_pd(54.0));

  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_i = _mm256_srli_epi64(bits, 52);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d k = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_i, magic)),
                            _mm256_castsi256_pd(magic));
  k = _mm256_sub_pd(k, _mm256_set1_pd(1022.0));
  k = _mm256_sub_pd(k, k_bias);

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i half_bits = _mm256_set1_epi64x(0x3FE0000000000000LL);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_bits));

  // m in [0.5, 1): fold into [sqrt(1/2), sqrt(2)) around 1.
  const __m256d sqrth = _mm256_set1_pd(0.70710678118654752440);
  const __m256d lt = _mm256_cmp_pd(m, sqrth, _CMP_LT_OQ);
  k = _mm256_sub_pd(k, _mm256_and_pd(lt, one));
  m = _mm256_add_pd(m, _mm256_and_pd(lt, m));
  const __m256d f = _mm256_sub_pd(m, one);

  const __m256d hfsq =
      _mm256_mul_pd(half, _mm256_mul_pd(f, f));
  const __m256d s =
      _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);

  __m256d t1 = _mm256_set1_pd(1.531383769920937332e-01);
  t1 = _mm256_add_pd(_mm256_mul_pd(t1, w), _mm256_set1_pd(2.222219843214978396e-01));
  t1 = _mm256_add_pd(_mm256_mul_pd(t1, w), _mm256_set1_pd(3.999999999940941908e-01));
  t1 = _mm256_mul_pd(t1, w);

  __m256d t2 = _mm256_set1_pd(1.479819860511658591e-01);
  t2 = _mm256_add_pd(_mm256_mul_pd(t2, w), _mm256_set1_pd(1.818357216161805012e-01));
  t2 = _mm256_add_pd(_mm256_mul_pd(t2, w), _mm256_set1_pd(2.857142874366239149e-01));
  t2 = _mm256_add_pd(_mm256_mul_pd(t2, w), _mm256_set1_pd(6.666666666666735130e-01));
  t2 = _mm256_mul_pd(t2, z);

  const __m256d rr = _mm256_add_pd(t2, t1);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

  // k*ln2_hi - ((hfsq - (s*(hfsq+R) + k*ln2_lo)) - f)
  const __m256d inner = _mm256_add_pd(
      _mm256_mul_pd(s, _mm256_add_pd(hfsq, rr)), _mm256_mul_pd(k, ln2_lo));
  const __m256d outer = _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f);
  return _mm256_sub_pd(_mm256_mul_pd(k, ln2_hi), outer);
}

} // namespace

double reduce_sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double total = hsum(acc);
  for (; i < n; ++i) total += x[i];
  return total;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void combine(double w1, const double* x, const double* w2, const double* y,
             double* out, std::size_t n) {
  const __m256d w1v = _mm256_set1_pd(w1);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d lhs = _mm256_mul_pd(w1v, _mm256_loadu_pd(x + i));
    const __m256d rhs =
        _mm256_mul_pd(_mm256_loadu_pd(w2 + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(lhs, rhs));
  }
  for (; i < n; ++i) out[i] = w1 * x[i] + w2[i] * y[i];
}

void ucb_fill(const double* q, const double* m, double c, double* out,
              std::size_t n) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mv = _mm256_loadu_pd(m + i);
    const __m256d untried = _mm256_cmp_pd(mv, zero, _CMP_EQ_OQ);
    const __m256d bonus = _mm256_sqrt_pd(_mm256_div_pd(cv, mv));
    const __m256d score = _mm256_add_pd(_mm256_loadu_pd(q + i), bonus);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(score, inf, untried));
  }
  constexpr double sinf = std::numeric_limits<double>::infinity();
  for (; i < n; ++i) {
    out[i] = (m[i] == 0.0) ? sinf : q[i] + std::sqrt(c / m[i]);
  }
}

double kl_sum(const double* p, const double* q, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d pv = _mm256_loadu_pd(p + i);
    const __m256d qv = _mm256_loadu_pd(q + i);
    const __m256d live = _mm256_cmp_pd(pv, zero, _CMP_GT_OQ);
    const __m256d ratio = _mm256_blendv_pd(one, _mm256_div_pd(pv, qv), live);
    const __m256d term = _mm256_and_pd(_mm256_mul_pd(pv, log_pd(ratio)), live);
    acc = _mm256_add_pd(acc, term);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    if (p[i] > 0.0) total += p[i] * std::log(p[i] / q[i]);
  }
  return total;
}

} // namespace uavsim::kernels::avx2

#endif
