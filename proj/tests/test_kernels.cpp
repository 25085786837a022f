#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "hsvar/kernels.hpp"
#include "hsvar/rng.hpp"

using namespace hsvar;
namespace k = hsvar::kernels;

namespace {

std::vector<double> randn(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("scalar kernels against direct loops") {
  Rng rng(1);
  const std::size_t n = 37;
  const std::size_t kk = 5;
  const auto X = randn(n * kk, rng);
  auto w = randn(n, rng);
  for (auto& x : w) x = std::abs(x);
  std::vector<double> G(kk * kk);
  k::scalar::weighted_gram(X.data(), n, kk, w.data(), G.data());
  for (std::size_t a = 0; a < kk; ++a) {
    for (std::size_t b = 0; b < kk; ++b) {
      long double s = 0;
      for (std::size_t t = 0; t < n; ++t) s += X[a * n + t] * X[b * n + t] * w[t];
      CHECK(G[b * kk + a] == doctest::Approx(static_cast<double>(s)).epsilon(1e-13));
    }
  }
  const auto y = randn(n, rng);
  long double d = 0;
  for (std::size_t t = 0; t < n; ++t) d += X[t] * y[t] * w[t];
  CHECK(k::scalar::weighted_dot(X.data(), y.data(), w.data(), n) ==
        doctest::Approx(static_cast<double>(d)).epsilon(1e-13));
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!k::avx2_available()) {
    MESSAGE("AVX2 unavailable on this host; equivalence not exercised");
    CHECK_FALSE(k::set_backend(k::Backend::avx2));
    return;
  }
  Rng rng(2);
  for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
    for (std::size_t kk : {1u, 2u, 5u, 9u}) {
      const auto X = randn(n * kk, rng);
      auto w = randn(n, rng);
      for (auto& x : w) x = std::abs(x);
      std::vector<double> a(kk * kk), b(kk * kk);
      k::scalar::weighted_gram(X.data(), n, kk, w.data(), a.data());
      k::avx2::weighted_gram(X.data(), n, kk, w.data(), b.data());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12).scale(1.0));
      }
      const auto y = randn(n, rng);
      CHECK(k::avx2::weighted_dot(X.data(), y.data(), w.data(), n) ==
            doctest::Approx(k::scalar::weighted_dot(X.data(), y.data(), w.data(), n))
                .epsilon(1e-12)
                .scale(1.0));
    }
    // Elementwise kernel: identical bits.
    for (std::size_t K : {1u, 4u, 10u, 13u}) {
      const auto x = randn(n, rng);
      const auto mean = randn(K, rng);
      auto hp = randn(K, rng);
      for (auto& v : hp) v = std::abs(v);
      const auto off = randn(K, rng);
      std::vector<double> a(n * K), b(n * K);
      k::scalar::mixture_logits(x.data(), n, mean.data(), hp.data(), off.data(), K, a.data());
      k::avx2::mixture_logits(x.data(), n, mean.data(), hp.data(), off.data(), K, b.data());
      CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("backend selection") {
  const k::Backend before = k::active_backend();
  CHECK(k::set_backend(k::Backend::scalar));
  CHECK(k::active_backend() == k::Backend::scalar);
  CHECK(k::backend_name(k::Backend::scalar) == "scalar");
  CHECK(k::backend_name(k::Backend::avx2) == "avx2");
  CHECK(k::set_backend(k::Backend::avx2) == k::avx2_available());
  k::set_backend(before);
}
