#pragma once

// Inner loops of the sampler with a portable reference implementation and an
// AVX2 variant chosen at runtime. Elementwise kernels return identical bits
// on every backend; reductions agree to rounding.

#include <cstddef>
#include <string_view>

namespace hsvar::kernels {

enum class Backend { scalar, avx2 };

/// True when the AVX2 variant was compiled in and the CPU supports it.
bool avx2_available();

/// Backend currently used by the dispatching entry points. Initialised from
/// HSVAR_KERNELS ("scalar" or "avx2") when set, otherwise the fastest one.
Backend active_backend();

/// Select a backend; returns false (and changes nothing) if unavailable.
bool set_backend(Backend b);

std::string_view backend_name(Backend b);

/// out (k x k, column-major) = X' diag(w) X for column-major X (n x k).
void weighted_gram(const double* X, std::size_t n, std::size_t k, const double* w, double* out);

/// sum_t x[t] * y[t] * w[t]
double weighted_dot(const double* x, const double* y, const double* w, std::size_t n);

/// out[t*K + j] = offset[j] - half_prec[j] * (x[t] - mean[j])^2
void mixture_logits(const double* x, std::size_t n, const double* mean, const double* half_prec,
                    const double* offset, std::size_t K, double* out);

namespace scalar {
void weighted_gram(const double* X, std::size_t n, std::size_t k, const double* w, double* out);
double weighted_dot(const double* x, const double* y, const double* w, std::size_t n);
void mixture_logits(const double* x, std::size_t n, const double* mean, const double* half_prec,
                    const double* offset, std::size_t K, double* out);
}  // namespace scalar

namespace avx2 {
void weighted_gram(const double* X, std::size_t n, std::size_t k, const double* w, double* out);
double weighted_dot(const double* x, const double* y, const double* w, std::size_t n);
void mixture_logits(const double* x, std::size_t n, const double* mean, const double* half_prec,
                    const double* offset, std::size_t K, double* out);
}  // namespace avx2

}  // namespace hsvar::kernels
