#include <atomic>
#include <cstdlib>
#include <string_view>

#include "hsvar/kernels.hpp"

namespace hsvar::kernels {
namespace {

bool detect_avx2() {
#if defined(HSVAR_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() {
  const bool have = detect_avx2();
  if (const char* env = std::getenv("HSVAR_KERNELS")) {
    const std::string_view v(env);
    if (v == "scalar") {
      return Backend::scalar;
    }
    if (v == "avx2" && have) {
      return Backend::avx2;
    }
  }
  return have ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

bool avx2_available() {
  static const bool have = detect_avx2();
  return have;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

bool set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) {
    return false;
  }
  current().store(b, std::memory_order_relaxed);
  return true;
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

#if defined(HSVAR_HAVE_AVX2)
#define HSVAR_DISPATCH(fn, ...) \
  (active_backend() == Backend::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define HSVAR_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void weighted_gram(const double* X, std::size_t n, std::size_t k, const double* w, double* out) {
  HSVAR_DISPATCH(weighted_gram, X, n, k, w, out);
}

double weighted_dot(const double* x, const double* y, const double* w, std::size_t n) {
  return HSVAR_DISPATCH(weighted_dot, x, y, w, n);
}

void mixture_logits(const double* x, std::size_t n, const double* mean, const double* half_prec,
                    const double* offset, std::size_t K, double* out) {
  HSVAR_DISPATCH(mixture_logits, x, n, mean, half_prec, offset, K, out);
}

#undef HSVAR_DISPATCH

}  // namespace hsvar::kernels
