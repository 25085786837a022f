#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "hsvar/special.hpp"
#include "test_support.hpp"

using namespace hsvar;
using namespace hsvar::special;

TEST_CASE("log Bessel K matches the high-precision table") {
  const auto rows = test::reference_rows("bessel_k_log.csv");
  REQUIRE(rows.size() == 120);
  for (const auto& r : rows) {
    const double got = log_bessel_k(r[0], r[1]);
    INFO("nu=" << r[0] << " x=" << r[1]);
    CHECK(std::abs(got - r[2]) <= 1e-12 * std::max(1.0, std::abs(r[2])));
  }
}

TEST_CASE("log Bessel K stays finite for vanishing arguments") {
  // K_{1/2}(x) = sqrt(pi / 2x) exp(-x).
  for (double x : {1e-25, 1e-200, 1e-310, std::numeric_limits<double>::denorm_min()}) {
    INFO("x=" << x);
    const double exact = 0.5 * std::log(std::numbers::pi / 2.0) - 0.5 * std::log(x) - x;
    CHECK(log_bessel_k(0.5, x) == doctest::Approx(exact).epsilon(1e-14));
  }
  // K_3(x) ~ 8 / x^3.
  CHECK(log_bessel_k(3.0, 1e-200) == doctest::Approx(std::log(8.0) + 600.0 * std::log(10.0)).epsilon(1e-14));
  for (double nu : {0.0, 1e-9, 0.01, 0.3, 0.999, 1.0, 1.7, 4.0}) {
    INFO("nu=" << nu);
    // The series applies at 1e-20, the small-argument form just below it.
    const double below = std::nextafter(1e-20, 0.0);
    CHECK(log_bessel_k(nu, below) == doctest::Approx(log_bessel_k(nu, 1e-20)).epsilon(1e-12));
  }
}

TEST_CASE("Bessel K is even in the order and flags range problems") {
  CHECK(log_bessel_k(-2.3, 1.7) == doctest::Approx(log_bessel_k(2.3, 1.7)).epsilon(1e-15));
  CHECK(bessel_k_checked(200.0, 1e-3).status == BesselStatus::overflow);
  CHECK(bessel_k_checked(0.0, 1000.0).status == BesselStatus::underflow);
  CHECK(bessel_k_checked(1.0, 1.0).status == BesselStatus::ok);
  CHECK_THROWS_AS(bessel_k(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(bessel_k(0.0, -1.0), DomainError);
}

TEST_CASE("normal-product CDF matches quadrature of the density") {
  for (const auto& r : test::reference_rows("np_cdf.csv")) {
    INFO("sigma2=" << r[0] << " z=" << r[1]);
    CHECK(std::abs(np_cdf(r[1], {r[0]}) - r[2]) < 1e-12);
    CHECK(std::abs(np_cdf(-r[1], {r[0]}) - (1.0 - r[2])) < 1e-12);
  }
  CHECK(np_cdf(0.0, {2.0}) == 0.5);
  CHECK(np_central_mass(0.3, {1.0}) == doctest::Approx(2.0 * np_cdf(0.3, {1.0}) - 1.0).epsilon(1e-13));
}

TEST_CASE("normal-product density is the law of a product of normals") {
  // P(|XY| < 1) for X, Y ~ N(0, 1) by integrating the normal law of X given Y.
  const boost::math::normal_distribution<double> z;
  boost::math::quadrature::exp_sinh<double> q;
  const double direct = 2.0 * q.integrate(
                                  [&](double y) {
                                    return boost::math::pdf(z, y) *
                                           (2.0 * boost::math::cdf(z, 1.0 / y) - 1.0);
                                  },
                                  0.0, std::numeric_limits<double>::infinity());
  CHECK(np_central_mass(1.0, {1.0}) == doctest::Approx(direct).epsilon(1e-10));
  CHECK(std::isinf(np_logpdf(0.0, {1.0})));
  CHECK_THROWS_AS(np_pdf(1.0, {0.0}), DomainError);
}

TEST_CASE("log normal-product law by change of variables") {
  const NormalProductParams p{0.7};
  CHECK(lognp_pdf(2.0, p) == doctest::Approx(np_pdf(std::log(2.0), p) / 2.0).epsilon(1e-14));
  CHECK(lognp_cdf(1.0, p) == 0.5);
  CHECK_THROWS_AS(lognp_pdf(0.0, p), DomainError);
  CHECK_THROWS_AS(lognp_cdf(-1.0, p), DomainError);
  // Behaviour at the origin depends on whether sigma2 is below or above 1.
  CHECK(lognp_pdf(1e-12, {0.5}) < lognp_pdf(1e-6, {0.5}));
  CHECK(lognp_pdf(1e-12, {2.0}) > lognp_pdf(1e-6, {2.0}));
}

TEST_CASE("multivariate normal product reduces to the scalar law") {
  MvNormalProductParams p{0.8, Eigen::MatrixXd::Identity(1, 1)};
  const double z = 0.37;
  CHECK(mnp_logpdf(std::span<const double>(&z, 1), p) ==
        doctest::Approx(np_logpdf(z, {0.8})).epsilon(1e-13));
  CHECK_THROWS_AS(mnp_logpdf(std::span<const double>(&z, 1),
                             {0.8, Eigen::MatrixXd::Identity(2, 2)}),
                  DomainError);
}

TEST_CASE("bivariate normal product integrates to one") {
  MvNormalProductParams p{1.3, (Eigen::Matrix2d() << 1.0, 0.4, 0.4, 2.0).finished()};
  // Integrate in polar coordinates; the density depends on z only through a quadratic form.
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double total = ts.integrate(
      [&](double th) {
        auto f = [&](double r) {
          const double z[2] = {r * std::cos(th), r * std::sin(th)};
          return r * std::exp(mnp_logpdf(std::span<const double>(z, 2), p));
        };
        // Split at r = 1 so neither rule samples the origin.
        return ts.integrate(f, 0.0, 1.0) +
               es.integrate(f, 1.0, std::numeric_limits<double>::infinity());
      },
      0.0, 2.0 * std::numbers::pi);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("marginal omega density matches the integrated hierarchy") {
  for (const auto& r : test::reference_rows("marginal_omega.csv")) {
    INFO("S=" << r[0] << " A=" << r[1] << " omega=" << r[2]);
    CHECK(marginal_omega_pdf(r[2], {r[0], r[1]}) == doctest::Approx(r[3]).epsilon(1e-10));
  }
  CHECK(marginal_omega_at_zero({0.05, 1.0}) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
  CHECK(std::isinf(marginal_omega_at_zero({0.05, 0.5})));
  CHECK(marginal_omega_pdf(1e-9, {0.05, 1.0}) ==
        doctest::Approx(marginal_omega_at_zero({0.05, 1.0})).epsilon(1e-6));
}

namespace {

test::Moments gig_draws(double lambda, double chi, double psi, int n, Rng& rng) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) {
    v = sample_gig(lambda, chi, psi, rng);
    REQUIRE(v > 0.0);
  }
  return test::moments(x);
}

}  // namespace

TEST_CASE("GIG sampler reproduces the mean in every generator regime") {
  Rng rng(11);
  struct Case {
    double lambda, chi, psi;
  };
  // Three-region hat, ROU without shift, ROU with shift, closed-form cases
  // and negative orders through reciprocal symmetry.
  const Case cases[] = {{0.2, 0.01, 0.02}, {0.8, 0.5, 0.5}, {3.0, 5.0, 5.0},
                        {-1.5, 2.0, 0.5},  {0.5, 1.0, 2.0}, {-0.5, 1.0, 2.0},
                        {0.0, 1.0, 1.0},   {-3.0, 0.4, 0.1}};
  for (const auto& c : cases) {
    const auto m = gig_draws(c.lambda, c.chi, c.psi, 40000, rng);
    INFO("lambda=" << c.lambda << " chi=" << c.chi << " psi=" << c.psi);
    CHECK(std::abs(m.mean - gig_mean(c.lambda, c.chi, c.psi)) < 4.5 * m.se);
  }
  // Gamma limit (chi = 0) and inverse-gamma limit (psi = 0).
  auto g = gig_draws(2.5, 0.0, 3.0, 40000, rng);
  CHECK(std::abs(g.mean - 2.5 * 2.0 / 3.0) < 4.5 * g.se);
  auto ig = gig_draws(-4.0, 3.0, 0.0, 40000, rng);
  CHECK(std::abs(ig.mean - 3.0 / (2.0 * 3.0)) < 4.5 * ig.se);
  CHECK_THROWS_AS(sample_gig(1.0, -1.0, 1.0, rng), DomainError);
}

TEST_CASE("truncated normal stays inside its bounds and has the right mean") {
  Rng rng(5);
  const boost::math::normal_distribution<double> z;
  struct Case {
    double mu, var, lo, hi;
  };
  const Case cases[] = {{0.0, 1.0, -0.5, 0.7}, {0.0, 1.0, 3.0, INFINITY}, {2.0, 0.25, -INFINITY, -1.0},
                        {0.3, 4.0, -1.0, 1.0}, {0.0, 1.0, 5.0, 5.5}};
  for (const auto& c : cases) {
    std::vector<double> x(40000);
    for (auto& v : x) {
      v = sample_truncnorm(c.mu, c.var, c.lo, c.hi, rng);
      REQUIRE(v > c.lo);
      REQUIRE(v < c.hi);
    }
    const double s = std::sqrt(c.var);
    const double a = (c.lo - c.mu) / s;
    const double b = (c.hi - c.mu) / s;
    const double pa = std::isinf(a) ? 0.0 : boost::math::pdf(z, a);
    const double pb = std::isinf(b) ? 0.0 : boost::math::pdf(z, b);
    const double mass = boost::math::cdf(boost::math::complement(z, a)) -
                        boost::math::cdf(boost::math::complement(z, b));
    const double mean = c.mu + s * (pa - pb) / mass;
    const auto m = test::moments(x);
    INFO("lo=" << c.lo << " hi=" << c.hi);
    CHECK(std::abs(m.mean - mean) < 4.5 * m.se);
  }
}

TEST_CASE("inverse Gaussian, gamma and inverted-gamma moments") {
  Rng rng(8);
  std::vector<double> ig(50000), ga(50000), ig2(50000);
  for (std::size_t i = 0; i < ig.size(); ++i) {
    ig[i] = sample_inverse_gaussian(1.5, 2.0, rng);
    ga[i] = sample_gamma(3.0, 0.5, rng);
    ig2[i] = sample_ig2(4.0, 10.0, rng);
  }
  const auto mi = test::moments(ig);
  CHECK(std::abs(mi.mean - 1.5) < 4.5 * mi.se);
  CHECK(mi.var == doctest::Approx(1.5 * 1.5 * 1.5 / 2.0).epsilon(0.05));
  const auto mg = test::moments(ga);
  CHECK(std::abs(mg.mean - 1.5) < 4.5 * mg.se);
  const auto m2 = test::moments(ig2);
  CHECK(std::abs(m2.mean - 4.0 / (10.0 - 2.0)) < 4.5 * m2.se);
}

TEST_CASE("generalized-normal row has the chi-square law in one dimension") {
  Rng rng(9);
  const Eigen::MatrixXd S_inv = Eigen::MatrixXd::Constant(1, 1, 1.0 / 2.5);
  const Eigen::MatrixXd none(0, 1);
  std::vector<double> b2(40000);
  for (auto& v : b2) {
    const double b = sample_generalized_normal_row(S_inv, 7.0, none, rng)(0);
    v = b * b;
  }
  const auto m = test::moments(b2);
  CHECK(std::abs(m.mean - 2.5 * 7.0) < 4.5 * m.se);
}

TEST_CASE("generalized-normal row matches a one-dimensional density along the free direction") {
  // With the other row fixed at (0, 1), det(B0) = b_1 and b_2 is Gaussian.
  Rng rng(10);
  const Eigen::Matrix2d S_inv = Eigen::Matrix2d::Identity();
  const Eigen::MatrixXd other = (Eigen::MatrixXd(1, 2) << 0.0, 1.0).finished();
  std::vector<double> b1sq(40000), b2(40000);
  for (std::size_t i = 0; i < b2.size(); ++i) {
    const Eigen::RowVectorXd b = sample_generalized_normal_row(S_inv, 6.0, other, rng);
    b1sq[i] = b(0) * b(0);
    b2[i] = b(1);
  }
  // |b1|^(nu_bar - N) exp(-b1^2 / 2) means b1^2 ~ chi-square with nu_bar - 1 dof.
  const auto m1 = test::moments(b1sq);
  CHECK(std::abs(m1.mean - 5.0) < 4.5 * m1.se);
  const auto m2 = test::moments(b2);
  CHECK(std::abs(m2.mean) < 4.5 * m2.se);
  CHECK(m2.var == doctest::Approx(1.0).epsilon(0.04));
  CHECK_THROWS_AS(sample_generalized_normal_row(S_inv, 6.0, Eigen::MatrixXd::Zero(1, 2), rng),
                  NumericalError);
}
