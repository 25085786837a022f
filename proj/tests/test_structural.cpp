#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "hsvar/errors.hpp"
#include "hsvar/structural.hpp"

using namespace hsvar;

namespace {

StructuralState make_draw(const Eigen::MatrixXd& B0, int K, Rng& rng) {
  StructuralState s;
  const Eigen::Index N = B0.rows();
  s.B0 = B0;
  s.A = Eigen::MatrixXd::Random(N, K) * 0.2;
  s.sv.resize(static_cast<std::size_t>(N));
  for (Eigen::Index n = 0; n < N; ++n) {
    s.sv[n].omega = static_cast<double>(n) + 0.5;
    s.sv[n].rho = 0.1 * static_cast<double>(n);
    s.sv[n].h = Eigen::VectorXd::Constant(4, rng.normal());
  }
  s.hyper.gamma_0 = Eigen::VectorXd::LinSpaced(N, 1.0, 2.0);
  s.hyper.s_0 = Eigen::VectorXd::LinSpaced(N, 3.0, 4.0);
  s.hyper.gamma_A = Eigen::VectorXd::Ones(N);
  s.hyper.s_A = Eigen::VectorXd::Ones(N);
  return s;
}

Eigen::MatrixXd random_matrix(Eigen::Index N, Rng& rng) {
  Eigen::MatrixXd M(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) M(i, j) = rng.normal();
  return M;
}

}  // namespace

TEST_CASE("VMA recursion for one and two lags") {
  Eigen::MatrixXd A1(2, 2);
  A1 << 0.5, 0.1, 0.0, 0.3;
  auto phi = compute_phi({A1}, 4);
  REQUIRE(phi.size() == 5);
  CHECK((phi[3] - A1 * A1 * A1).norm() < 1e-15);
  Eigen::MatrixXd A2 = 0.2 * Eigen::MatrixXd::Identity(2, 2);
  phi = compute_phi({A1, A2}, 3);
  CHECK((phi[2] - (A1 * A1 + A2)).norm() < 1e-15);
  CHECK((phi[3] - (A1 * phi[2] + A2 * A1)).norm() < 1e-15);
  CHECK_THROWS_AS(compute_phi({A1}, -1), DomainError);
}

TEST_CASE("impulse responses and impact scaling") {
  Rng rng(1);
  Eigen::MatrixXd B0(2, 2);
  B0 << 2.0, 0.0, -1.0, 1.0;
  StructuralState d = make_draw(B0, 3, rng);
  const IrfResult r = compute_irf(d, 1, 0);
  REQUIRE(r.theta.size() == 1);
  CHECK((r.theta[0] - B0.inverse()).norm() < 1e-15);
  const IrfResult s = compute_irf(d, 1, 3, ImpactScaling{0, 1, 0.25});
  CHECK(s.theta[0](1, 0) == doctest::Approx(0.25));
  const IrfResult u = compute_irf(d, 1, 3);
  CHECK(s.theta[2](0, 0) / u.theta[2](0, 0) == doctest::Approx(0.25 / u.theta[0](1, 0)));
  CHECK(s.theta[2](0, 1) == u.theta[2](0, 1));
}

TEST_CASE("row normalization matches brute-force enumeration") {
  Rng rng(7);
  for (int N = 1; N <= 4; ++N) {
    for (int rep = 0; rep < 20; ++rep) {
      NormalizationBenchmark bench{random_matrix(N, rng), {}};
      if (rep % 2 == 1) {
        // Full weighting matrix: exercises the non-separable search.
        const Eigen::MatrixXd G = random_matrix(N * N, rng);
        bench.Omega_hat = G * G.transpose() + Eigen::MatrixXd::Identity(N * N, N * N);
      }
      const Eigen::MatrixXd B0 = random_matrix(N, rng);
      const RowTransform best = best_row_transform(B0, bench);
      std::vector<int> perm(static_cast<std::size_t>(N));
      std::iota(perm.begin(), perm.end(), 0);
      double brute = INFINITY;
      do {
        for (int mask = 0; mask < (1 << N); ++mask) {
          RowTransform t{perm, std::vector<int>(static_cast<std::size_t>(N)), 0.0};
          for (int i = 0; i < N; ++i) t.sign[i] = (mask >> i) & 1 ? -1 : 1;
          brute = std::min(brute, normalization_distance(B0, t, bench));
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(best.distance == doctest::Approx(brute).epsilon(1e-12));
      CHECK(normalization_distance(B0, best, bench) == best.distance);
    }
  }
}

TEST_CASE("normalization is idempotent and carries the volatility states") {
  Rng rng(3);
  Eigen::MatrixXd bench(2, 2);
  bench << 1.0, 0.0, -0.5, 1.0;
  Eigen::MatrixXd B0(2, 2);
  B0 << 0.6, -1.1, -0.9, 0.1;  // swapped and sign-flipped relative to the benchmark
  PosteriorSample s;
  s.draws.push_back(make_draw(B0, 3, rng));
  s.sddr_moments.push_back({{1.0, 0.1}, {2.0, 0.2}});
  const PosteriorSample n1 = normalize_sample(s, {bench, {}});
  const RowTransform tr = best_row_transform(B0, {bench, {}});
  CHECK(tr.perm == std::vector<int>{1, 0});
  CHECK(n1.draws[0].sv[0].omega == s.draws[0].sv[1].omega);
  CHECK(n1.draws[0].hyper.gamma_0(0) == s.draws[0].hyper.gamma_0(1));
  CHECK(n1.sddr_moments[0][0].mean == 2.0);
  CHECK(n1.draws[0].A == s.draws[0].A);
  const PosteriorSample n2 = normalize_sample(n1, {bench, {}});
  CHECK(std::memcmp(n1.draws[0].B0.data(), n2.draws[0].B0.data(), 4 * sizeof(double)) == 0);
  const RowTransform id = best_row_transform(n1.draws[0].B0, {bench, {}});
  CHECK(id.perm == std::vector<int>{0, 1});
  CHECK(id.sign == std::vector<int>{1, 1});
}

TEST_CASE("ties resolve to the identity transform") {
  const Eigen::MatrixXd B0 = Eigen::MatrixXd::Identity(2, 2);
  const NormalizationBenchmark bench{Eigen::MatrixXd::Zero(2, 2), {}};
  const RowTransform t = best_row_transform(B0, bench);
  CHECK(t.perm == std::vector<int>{0, 1});
  CHECK(t.sign == std::vector<int>{1, 1});
}

TEST_CASE("shortest-interval HPD") {
  const Interval a = hpd_interval({1, 2, 3, 4, 100}, 0.6);
  CHECK(a.lower == 1.0);
  CHECK(a.upper == 3.0);
  const Interval b = hpd_interval({-50, 0, 0.1, 0.2, 9}, 0.6);
  CHECK(b.lower == 0.0);
  CHECK(b.upper == 0.2);
  CHECK_THROWS_AS(hpd_interval({}, 0.9), DomainError);
  CHECK_THROWS_AS(hpd_interval({1.0}, 0.0), DomainError);
}

TEST_CASE("variance paths start at one") {
  Rng rng(2);
  PosteriorSample s;
  for (int k = 0; k < 10; ++k) s.draws.push_back(make_draw(Eigen::MatrixXd::Identity(2, 2), 3, rng));
  const VariancePaths v = conditional_variance_paths(s, 0.9);
  CHECK(v.mean.rows() == 5);
  CHECK(v.mean.row(0) == Eigen::RowVector2d(1.0, 1.0));
  CHECK((v.lower.array() <= v.upper.array()).all());
  s.draws[3].sv[0].h.resize(0);
  CHECK_THROWS_AS(conditional_variance_paths(s, 0.9), DomainError);
}

TEST_CASE("three-matrix benchmark") {
  const Eigen::Vector2d sigma(2.0, 4.0);
  Eigen::Matrix2d M1, M2;
  M1 << 1, 0, 0.5, 1;
  M2 << 1, 0.3, 0, 1;
  const Eigen::MatrixXd B = three_matrix_benchmark(sigma, M1, M2);
  CHECK((B - sigma.cwiseInverse().asDiagonal() * M1.inverse() * M2).norm() < 1e-15);
  CHECK_THROWS_AS(three_matrix_benchmark(sigma, Eigen::Matrix2d::Zero(), M2), DomainError);
}
