#if defined(INVERTKIT_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

#include "invertkit/kernels.hpp"

namespace invertkit::kernels {

namespace {

// 4-wide lanes with scalar tails. Each lane op is the same single IEEE
// instruction the scalar kernel applies, so results match it bit for bit.

void add_v(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_v(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_v(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void div_v(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] / b[i];
}

void neg_v(const double* a, double* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_xor_pd(_mm256_loadu_pd(a + i), sign));
  }
  for (; i < n; ++i) out[i] = -a[i];
}

void fill_v(double value, double* out, std::size_t n) {
  const __m256d v = _mm256_set1_pd(value);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, v);
  for (; i < n; ++i) out[i] = value;
}

bool any_eq_zero_v(const double* a, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d eq =
        _mm256_cmp_pd(_mm256_loadu_pd(a + i), zero, _CMP_EQ_OQ);
    if (_mm256_movemask_pd(eq) != 0) return true;
  }
  for (; i < n; ++i) {
    if (a[i] == 0.0) return true;
  }
  return false;
}

bool any_nonpositive_v(const double* a, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d le =
        _mm256_cmp_pd(_mm256_loadu_pd(a + i), zero, _CMP_LE_OQ);
    if (_mm256_movemask_pd(le) != 0) return true;
  }
  for (; i < n; ++i) {
    if (a[i] <= 0.0) return true;
  }
  return false;
}

bool all_finite_v(const double* a, std::size_t n) {
  // |x| < inf is false for NaN under an ordered compare, matching
  // isfinite.
  const __m256d abs_mask = _mm256_set1_pd(-0.0);
  const __m256d inf = _mm256_set1_pd(__builtin_inf());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mag = _mm256_andnot_pd(abs_mask, _mm256_loadu_pd(a + i));
    const __m256d fin = _mm256_cmp_pd(mag, inf, _CMP_LT_OQ);
    if (_mm256_movemask_pd(fin) != 0xf) return false;
  }
  for (; i < n; ++i) {
    if (!std::isfinite(a[i])) return false;
  }
  return true;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table = {
      "avx2",  add_v,         sub_v,
      mul_v,   div_v,         neg_v,
      fill_v,  any_eq_zero_v, any_nonpositive_v,
      all_finite_v,
  };
  return table;
}

}  // namespace invertkit::kernels

#endif  // INVERTKIT_HAVE_AVX2
