#include <immintrin.h>

#include "hsvar/kernels.hpp"

namespace hsvar::kernels::avx2 {
namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double weighted_dot(const double* x, const double* y, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    const __m256d xw = _mm256_mul_pd(_mm256_loadu_pd(x + t), _mm256_loadu_pd(w + t));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(xw, _mm256_loadu_pd(y + t)));
  }
  double total = hsum(acc);
  for (; t < n; ++t) {
    total += x[t] * w[t] * y[t];
  }
  return total;
}

void weighted_gram(const double* X, std::size_t n, std::size_t k, const double* w, double* out) {
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const double acc = weighted_dot(X + i * n, X + j * n, w, n);
      out[i + j * k] = acc;
      out[j + i * k] = acc;
    }
  }
}

void mixture_logits(const double* x, std::size_t n, const double* mean, const double* half_prec,
                    const double* offset, std::size_t K, double* out) {
  for (std::size_t t = 0; t < n; ++t) {
    double* row = out + t * K;
    const __m256d xt = _mm256_set1_pd(x[t]);
    std::size_t j = 0;
    for (; j + 4 <= K; j += 4) {
      const __m256d d = _mm256_sub_pd(xt, _mm256_loadu_pd(mean + j));
      const __m256d q = _mm256_mul_pd(_mm256_loadu_pd(half_prec + j), _mm256_mul_pd(d, d));
      _mm256_storeu_pd(row + j, _mm256_sub_pd(_mm256_loadu_pd(offset + j), q));
    }
    for (; j < K; ++j) {
      const double d = x[t] - mean[j];
      const double q = half_prec[j] * (d * d);
      row[j] = offset[j] - q;
    }
  }
}

}  // namespace hsvar::kernels::avx2
