#include "hsvar/kernels.hpp"

namespace hsvar::kernels::scalar {

void weighted_gram(const double* X, std::size_t n, std::size_t k, const double* w, double* out) {
  for (std::size_t j = 0; j < k; ++j) {
    const double* xj = X + j * n;
    for (std::size_t i = 0; i <= j; ++i) {
      const double* xi = X + i * n;
      double acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        acc += xi[t] * w[t] * xj[t];
      }
      out[i + j * k] = acc;
      out[j + i * k] = acc;
    }
  }
}

double weighted_dot(const double* x, const double* y, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    acc += x[t] * w[t] * y[t];
  }
  return acc;
}

void mixture_logits(const double* x, std::size_t n, const double* mean, const double* half_prec,
                    const double* offset, std::size_t K, double* out) {
  for (std::size_t t = 0; t < n; ++t) {
    double* row = out + t * K;
    for (std::size_t j = 0; j < K; ++j) {
      const double d = x[t] - mean[j];
      const double q = half_prec[j] * (d * d);
      row[j] = offset[j] - q;
    }
  }
}

}  // namespace hsvar::kernels::scalar
