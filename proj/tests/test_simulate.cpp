#include <doctest.h>

#include <cmath>

#include "hsvar/errors.hpp"
#include "hsvar/simulate.hpp"
#include "test_support.hpp"

using namespace hsvar;
using namespace hsvar::sim;

TEST_CASE("homoskedastic shocks have unit variance") {
  DgpSpec s = preset("homoskedastic");
  s.T = 20000;
  const SimulationResult r = generate(s);
  CHECK((r.sigma2.array() == 1.0).all());
  for (int n = 0; n < 2; ++n) {
    std::vector<double> w(r.w.col(n).data(), r.w.col(n).data() + r.w.rows());
    const auto m = test::moments(w);
    // Var of the sample variance of normals is 2 / T.
    CHECK(std::abs(m.var - 1.0) < 3.0 * std::sqrt(2.0 / s.T));
  }
}

TEST_CASE("latent AR(1) has the stated persistence") {
  DgpSpec s = preset("heteroskedastic");
  s.T = 5000;
  s.seed = 4;
  const SimulationResult r = generate(s);
  const Eigen::VectorXd h = r.h.col(0);
  const double num = h.head(s.T - 1).dot(h.tail(s.T - 1));
  const double den = h.head(s.T - 1).squaredNorm();
  const double rho_hat = num / den;
  const double se = std::sqrt((1.0 - 0.64) / s.T);
  CHECK(std::abs(rho_hat - 0.8) < 3.0 * se);
}

TEST_CASE("layout, presample and determinism") {
  DgpSpec s = preset("heteroskedastic");
  s.T = 50;
  const SimulationResult a = generate(s);
  const SimulationResult b = generate(s);
  CHECK(a.data.Y.rows() == 51);
  CHECK(a.data.Y.row(0).isZero());
  CHECK(a.data.D.cols() == 1);
  CHECK(a.data.names == std::vector<std::string>{"y1", "y2"});
  CHECK(a.data.Y == b.data.Y);
  CHECK(a.h == b.h);
  // y_1 = c + B w_1 from the zero presample.
  const Eigen::Vector2d y1 = s.A.col(2) + s.B0.inverse() * a.w.row(0).transpose();
  CHECK((a.data.Y.row(1).transpose() - y1).norm() < 1e-14);
  s.seed = 2;
  CHECK(generate(s).data.Y != a.data.Y);
}

TEST_CASE("explosive systems are refused unless allowed") {
  DgpSpec s = preset("heteroskedastic");
  s.A(0, 0) = 1.2;
  const double radius = companion_spectral_radius(s.A, 1);
  CHECK(radius == doctest::Approx(1.2));
  try {
    generate(s);
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("spectral radius 1.2") != std::string::npos);
  }
  s.allow_unstable = true;
  s.T = 20;
  CHECK_NOTHROW(generate(s));
  s.rho(0) = 1.0;
  CHECK_THROWS_AS(generate(s), DomainError);
  CHECK_THROWS_AS(preset("nope"), DomainError);
}

TEST_CASE("conditional variance law at fixed omega is lognormal") {
  DgpSpec s = preset("heteroskedastic");
  Rng rng(12);
  SigmaCheckOptions o;
  o.n_rep = 100000;
  const SigmaCheckResult r = empirical_sigma_check(s, 0, 5, o, rng);
  CHECK(r.variance_factor == doctest::Approx((1 - std::pow(0.8, 10)) / (1 - 0.64)));
  CHECK(r.p_value > 0.01);
  const SigmaCheckResult r1 = empirical_sigma_check(s, 0, 1, o, rng);
  CHECK(r1.variance_factor == doctest::Approx(1.0));
}

TEST_CASE("conditional variance law with random omega is log normal-product") {
  DgpSpec s = preset("heteroskedastic");
  Rng rng(13);
  SigmaCheckOptions o;
  o.n_rep = 100000;
  o.random_omega = true;
  o.sigma2_omega = 0.3;
  const SigmaCheckResult r = empirical_sigma_check(s, 0, 4, o, rng);
  CHECK(r.ks_statistic < 0.02);
  CHECK_THROWS_AS(empirical_sigma_check(s, 0, 0, o, rng), DomainError);
}

TEST_CASE("Kolmogorov tail probability") {
  CHECK(kolmogorov_pvalue(0.0, 100) == 1.0);
  // Critical value 1.36 / sqrt(n) at the 5% level.
  const int n = 10000;
  CHECK(kolmogorov_pvalue(1.358 / std::sqrt(static_cast<double>(n)), n) ==
        doctest::Approx(0.05).epsilon(0.05));
}
