// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma
// and is reached only through the dispatch table after a CPU feature check,
// so it must not instantiate any inline library code shared with other TUs.

#include <immintrin.h>

#include "dfcr/kernels.hpp"

namespace dfcr::kernels {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256i tail_mask(std::size_t r) {
  return _mm256_set_epi64x(r > 3 ? -1 : 0, r > 2 ? -1 : 0, r > 1 ? -1 : 0, r > 0 ? -1 : 0);
}

inline __m256d load_tail(const double* p, __m256i mask) { return _mm256_maskload_pd(p, mask); }

inline void store_tail(double* p, __m256i mask, __m256d v) { _mm256_maskstore_pd(p, mask, v); }

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  const double l0 = _mm_cvtsd_f64(lo);
  const double l1 = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
  const double l2 = _mm_cvtsd_f64(hi);
  const double l3 = _mm_cvtsd_f64(_mm_unpackhi_pd(hi, hi));
  return (l0 + l1) + (l2 + l3);
}

inline __m256d vabs(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

// exp(x) for x <= 0. Cody-Waite reduction x = n ln2 + r, |r| <= ln2/2, then a
// degree-13 Taylor polynomial (truncation below 1e-17) and exponent scaling.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d min_x = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, min_x, _CMP_LT_OQ);
  x = _mm256_max_pd(x, min_x);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d nd = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(nd, ln2_hi, x);
  r = _mm256_fnmadd_pd(nd, ln2_lo, r);

  // 1/k! for k = 13..0
  static constexpr double kCoeff[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
      1.0,                1.0};
  __m256d p = _mm256_set1_pd(kCoeff[0]);
  for (int k = 1; k < 14; ++k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kCoeff[k]));

  // 2^n through the 1.5 * 2^52 rounding trick; n is in [-1021, 0].
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  const __m256i n_int =
      _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(nd, magic)), _mm256_castpd_si256(magic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n_int, _mm256_set1_epi64x(1023)), 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, result);
}

// log(1 + e) for e in [0, 1] via 2 atanh(s), s = e / (2 + e) <= 1/3.
inline __m256d log1p_unit(__m256d e) {
  const __m256d s = _mm256_div_pd(e, _mm256_add_pd(_mm256_set1_pd(2.0), e));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d q = _mm256_set1_pd(1.0 / 35.0);
  for (int k = 33; k >= 1; k -= 2) q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / k));
  return _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s), q);
}

void squared_distances_avx2(const double* cols, std::size_t n, std::size_t d, const double* q,
                            double* out) {
  const std::size_t full = n - n % kLanes;
  const __m256i mask = tail_mask(n % kLanes);
  for (std::size_t i = 0; i < full; i += kLanes) _mm256_storeu_pd(out + i, _mm256_setzero_pd());
  if (full < n) store_tail(out + full, mask, _mm256_setzero_pd());
  for (std::size_t k = 0; k < d; ++k) {
    const double* col = cols + k * n;
    const __m256d qk = _mm256_set1_pd(q[k]);
    for (std::size_t i = 0; i < full; i += kLanes) {
      const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(col + i), qk);
      _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), _mm256_mul_pd(diff, diff)));
    }
    if (full < n) {
      const __m256d diff = _mm256_sub_pd(load_tail(col + full, mask), qk);
      store_tail(out + full, mask,
                 _mm256_add_pd(load_tail(out + full, mask), _mm256_mul_pd(diff, diff)));
    }
  }
}

void affine_avx2(const double* cols, std::size_t n, std::size_t d, const double* w, double bias,
                 double* out) {
  const std::size_t full = n - n % kLanes;
  const __m256i mask = tail_mask(n % kLanes);
  const __m256d b = _mm256_set1_pd(bias);
  for (std::size_t i = 0; i < full; i += kLanes) _mm256_storeu_pd(out + i, b);
  if (full < n) store_tail(out + full, mask, b);
  for (std::size_t k = 0; k < d; ++k) {
    const double* col = cols + k * n;
    const __m256d wk = _mm256_set1_pd(w[k]);
    for (std::size_t i = 0; i < full; i += kLanes) {
      const __m256d prod = _mm256_mul_pd(wk, _mm256_loadu_pd(col + i));
      _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), prod));
    }
    if (full < n) {
      const __m256d prod = _mm256_mul_pd(wk, load_tail(col + full, mask));
      store_tail(out + full, mask, _mm256_add_pd(load_tail(out + full, mask), prod));
    }
  }
}

inline __m256d signs_of(__m256d f, __m256d u) {
  const __m256d nonneg = _mm256_cmp_pd(_mm256_add_pd(f, u), _mm256_setzero_pd(), _CMP_GE_OQ);
  return _mm256_blendv_pd(_mm256_set1_pd(-1.0), _mm256_set1_pd(1.0), nonneg);
}

void threshold_signs_avx2(const double* f, const double* u, std::size_t n, double* out) {
  const std::size_t full = n - n % kLanes;
  for (std::size_t i = 0; i < full; i += kLanes)
    _mm256_storeu_pd(out + i, signs_of(_mm256_loadu_pd(f + i), _mm256_loadu_pd(u + i)));
  if (full < n) {
    const __m256i mask = tail_mask(n % kLanes);
    store_tail(out + full, mask, signs_of(load_tail(f + full, mask), load_tail(u + full, mask)));
  }
}

double mean_squared_diff_avx2(const double* a, const double* b, std::size_t n) {
  if (n == 0) return 0.0;
  const std::size_t full = n - n % kLanes;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < full; i += kLanes) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(diff, diff, acc);
  }
  if (full < n) {
    const __m256i mask = tail_mask(n % kLanes);
    const __m256d diff = _mm256_sub_pd(load_tail(a + full, mask), load_tail(b + full, mask));
    acc = _mm256_fmadd_pd(diff, diff, acc);
  }
  return hsum(acc) / static_cast<double>(n);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  const std::size_t full = n - n % kLanes;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < full; i += kLanes)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  if (full < n) {
    const __m256i mask = tail_mask(n % kLanes);
    acc = _mm256_fmadd_pd(load_tail(a + full, mask), load_tail(b + full, mask), acc);
  }
  return hsum(acc);
}

double dot3_avx2(const double* a, const double* b, const double* c, std::size_t n) {
  const std::size_t full = n - n % kLanes;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < full; i += kLanes) {
    const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(c + i), acc);
  }
  if (full < n) {
    const __m256i mask = tail_mask(n % kLanes);
    const __m256d ab = _mm256_mul_pd(load_tail(a + full, mask), load_tail(b + full, mask));
    acc = _mm256_fmadd_pd(ab, load_tail(c + full, mask), acc);
  }
  return hsum(acc);
}

struct LogisticParts {
  __m256d e;         // exp(-|z|)
  __m256d inv;       // 1 / (1 + e)
  __m256d positive;  // z >= 0 lane mask
};

inline LogisticParts logistic_parts(__m256d z) {
  const __m256d e = exp_nonpositive(_mm256_sub_pd(_mm256_setzero_pd(), vabs(z)));
  return {e, _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_add_pd(_mm256_set1_pd(1.0), e)),
          _mm256_cmp_pd(z, _mm256_setzero_pd(), _CMP_GE_OQ)};
}

inline __m256d pm1_from(const LogisticParts& lp) {
  const __m256d mag = _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(1.0), lp.e), lp.inv);
  return _mm256_blendv_pd(_mm256_sub_pd(_mm256_setzero_pd(), mag), mag, lp.positive);
}

void logistic_pm1_avx2(const double* z, std::size_t n, double* out) {
  const std::size_t full = n - n % kLanes;
  for (std::size_t i = 0; i < full; i += kLanes)
    _mm256_storeu_pd(out + i, pm1_from(logistic_parts(_mm256_loadu_pd(z + i))));
  if (full < n) {
    const __m256i mask = tail_mask(n % kLanes);
    store_tail(out + full, mask, pm1_from(logistic_parts(load_tail(z + full, mask))));
  }
}

inline __m256d lsq_block(__m256d z, __m256d y, __m256d* resid, __m256d* slope) {
  const LogisticParts lp = logistic_parts(z);
  const __m256d r = _mm256_sub_pd(pm1_from(lp), y);
  *resid = r;
  *slope = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), lp.e), _mm256_mul_pd(lp.inv, lp.inv));
  return _mm256_mul_pd(r, r);
}

double lsq_terms_avx2(const double* z, const double* y, std::size_t n, double* resid,
                      double* slope) {
  const std::size_t full = n - n % kLanes;
  __m256d acc = _mm256_setzero_pd();
  __m256d r, s;
  for (std::size_t i = 0; i < full; i += kLanes) {
    acc = _mm256_add_pd(acc, lsq_block(_mm256_loadu_pd(z + i), _mm256_loadu_pd(y + i), &r, &s));
    _mm256_storeu_pd(resid + i, r);
    _mm256_storeu_pd(slope + i, s);
  }
  if (full < n) {
    const __m256i mask = tail_mask(n % kLanes);
    const __m256d sq =
        lsq_block(load_tail(z + full, mask), load_tail(y + full, mask), &r, &s);
    acc = _mm256_add_pd(acc, _mm256_and_pd(sq, _mm256_castsi256_pd(mask)));
    store_tail(resid + full, mask, r);
    store_tail(slope + full, mask, s);
  }
  return hsum(acc);
}

inline __m256d bernoulli_block(__m256d z, __m256d t, __m256d* score, __m256d* weight) {
  const LogisticParts lp = logistic_parts(z);
  const __m256d p = _mm256_blendv_pd(_mm256_mul_pd(lp.e, lp.inv), lp.inv, lp.positive);
  *score = _mm256_sub_pd(t, p);
  *weight = _mm256_mul_pd(lp.e, _mm256_mul_pd(lp.inv, lp.inv));
  const __m256d neg_part = _mm256_min_pd(z, _mm256_setzero_pd());
  const __m256d log_p = _mm256_sub_pd(neg_part, log1p_unit(lp.e));
  const __m256d one_minus_t = _mm256_sub_pd(_mm256_set1_pd(1.0), t);
  return _mm256_sub_pd(log_p, _mm256_mul_pd(one_minus_t, z));
}

double bernoulli_terms_avx2(const double* z, const double* t, std::size_t n, double* score,
                            double* weight) {
  const std::size_t full = n - n % kLanes;
  __m256d acc = _mm256_setzero_pd();
  __m256d sc, w;
  for (std::size_t i = 0; i < full; i += kLanes) {
    acc = _mm256_add_pd(acc,
                        bernoulli_block(_mm256_loadu_pd(z + i), _mm256_loadu_pd(t + i), &sc, &w));
    _mm256_storeu_pd(score + i, sc);
    _mm256_storeu_pd(weight + i, w);
  }
  if (full < n) {
    const __m256i mask = tail_mask(n % kLanes);
    const __m256d term =
        bernoulli_block(load_tail(z + full, mask), load_tail(t + full, mask), &sc, &w);
    acc = _mm256_add_pd(acc, _mm256_and_pd(term, _mm256_castsi256_pd(mask)));
    store_tail(score + full, mask, sc);
    store_tail(weight + full, mask, w);
  }
  return hsum(acc);
}

}  // namespace

extern const KernelTable kAvx2Table;
const KernelTable kAvx2Table{
    Isa::avx2,
    squared_distances_avx2,
    affine_avx2,
    threshold_signs_avx2,
    mean_squared_diff_avx2,
    dot_avx2,
    dot3_avx2,
    logistic_pm1_avx2,
    lsq_terms_avx2,
    bernoulli_terms_avx2,
};

}  // namespace dfcr::kernels
