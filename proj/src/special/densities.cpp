#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hsvar/special.hpp"

namespace hsvar::special {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEulerGamma = 0.57721566490153286061;

void check(NormalProductParams p) {
  if (!(p.sigma2 > 0.0) || !std::isfinite(p.sigma2)) {
    throw DomainError("normal product: sigma2 must be positive and finite");
  }
}

void check(const MarginalOmegaParams& p) {
  if (!(p.S > 0.0) || !(p.A > 0.0)) {
    throw DomainError("marginal omega: S and A must be positive");
  }
}

// Integral of K0 over (0, a) from its power series; converges for all a but
// is only used where cancellation is harmless.
double k0_integral_series(double a) {
  const double log_term = -(std::log(0.5 * a) + kEulerGamma);
  const double a2 = a * a;
  double c = a;  // a^(2k+1) / (4^k (k!)^2)
  double harmonic = 0.0;
  double sum = 0.0;
  for (int k = 0; k < 500; ++k) {
    if (k > 0) {
      c *= a2 / (4.0 * k * k);
      harmonic += 1.0 / k;
    }
    const double odd = 2.0 * k + 1.0;
    const double term = c / odd * (log_term + 1.0 / odd + harmonic);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) {
      break;
    }
  }
  return sum;
}

// Integral of K0 over (a, inf) for a > 0.
double k0_tail_integral(double a) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [a](double u) {
    const double x = a + u;
    return std::exp(log_bessel_k(0.0, x));
  };
  return integrator.integrate(f, 0.0, kInf);
}

// Integral of K0 over (0, a).
double k0_integral(double a) {
  if (a <= 4.0) {
    return k0_integral_series(a);
  }
  return 0.5 * std::numbers::pi - k0_tail_integral(a);
}

}  // namespace

double np_logpdf(double z, NormalProductParams p) {
  check(p);
  if (z == 0.0) {
    return kInf;
  }
  const double s = std::sqrt(p.sigma2);
  return log_bessel_k(0.0, std::abs(z) / s) - std::log(std::numbers::pi * s);
}

double np_pdf(double z, NormalProductParams p) { return std::exp(np_logpdf(z, p)); }

double np_cdf(double z, NormalProductParams p) {
  check(p);
  if (z == 0.0) {
    return 0.5;
  }
  if (std::isinf(z)) {
    return z > 0 ? 1.0 : 0.0;
  }
  const double half_mass = k0_integral(std::abs(z) / std::sqrt(p.sigma2)) / std::numbers::pi;
  return z > 0 ? 0.5 + half_mass : 0.5 - half_mass;
}

double np_central_mass(double eps, NormalProductParams p) {
  check(p);
  if (!(eps > 0.0)) {
    return 0.0;
  }
  return 2.0 / std::numbers::pi * k0_integral(eps / std::sqrt(p.sigma2));
}

double lognp_logpdf(double q, NormalProductParams p) {
  if (!(q > 0.0)) {
    throw DomainError("log normal product: q must be positive, got " + std::to_string(q));
  }
  const double z = std::log(q);
  return np_logpdf(z, p) - z;
}

double lognp_pdf(double q, NormalProductParams p) { return std::exp(lognp_logpdf(q, p)); }

double lognp_cdf(double q, NormalProductParams p) {
  if (!(q > 0.0)) {
    throw DomainError("log normal product: q must be positive, got " + std::to_string(q));
  }
  return np_cdf(std::log(q), p);
}

double mnp_logpdf(std::span<const double> Z, const MvNormalProductParams& p) {
  const auto T = static_cast<Eigen::Index>(Z.size());
  if (p.Sigma.rows() != T || p.Sigma.cols() != T) {
    throw DomainError("mnp_logpdf: Z has length " + std::to_string(T) + " but Sigma is " +
                      std::to_string(p.Sigma.rows()) + "x" + std::to_string(p.Sigma.cols()));
  }
  if (T == 0) {
    throw DomainError("mnp_logpdf: empty argument");
  }
  check(NormalProductParams{p.sigma2});
  Eigen::LLT<Eigen::MatrixXd> llt(p.Sigma);
  if (llt.info() != Eigen::Success) {
    throw DomainError("mnp_logpdf: Sigma is not positive definite");
  }
  const Eigen::Map<const Eigen::VectorXd> z(Z.data(), T);
  const Eigen::VectorXd w = llt.matrixL().solve(z);
  // Radius of the quadratic form, kept unsquared so tiny z does not underflow.
  const double radius = w.stableNorm() / std::sqrt(p.sigma2);
  if (radius == 0.0) {
    return kInf;
  }
  const double Td = static_cast<double>(T);
  const double logdet_sigma = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double logdet = Td * std::log(p.sigma2) + logdet_sigma;
  return -0.5 * (Td - 1.0) * std::numbers::ln2 - 0.5 * (Td + 1.0) * std::log(std::numbers::pi) -
         0.5 * logdet - 0.5 * (Td - 1.0) * std::log(radius) +
         log_bessel_k(0.5 * (Td - 1.0), radius);
}

double mlognp_logpdf(std::span<const double> Q, const MvNormalProductParams& p) {
  std::vector<double> z(Q.size());
  double log_jacobian = 0.0;
  for (std::size_t t = 0; t < Q.size(); ++t) {
    if (!(Q[t] > 0.0)) {
      throw DomainError("mlognp_logpdf: entry " + std::to_string(t) + " is not positive");
    }
    z[t] = std::log(Q[t]);
    log_jacobian += z[t];
  }
  return mnp_logpdf(z, p) - log_jacobian;
}

double marginal_omega_logpdf(double omega, MarginalOmegaParams p) {
  check(p);
  if (omega == 0.0) {
    return std::log(marginal_omega_at_zero(p));
  }
  const double nu = p.A - 0.5;
  const double a = std::abs(omega);
  const double log_const = 0.5 * std::log(std::numbers::pi) +
                           0.5 * (p.A - 1.5) * std::numbers::ln2 + std::lgamma(p.A) +
                           0.5 * (p.A + 0.5) * std::log(p.S);
  return nu * std::log(a) + log_bessel_k(nu, std::sqrt(2.0 / p.S) * a) - log_const;
}

double marginal_omega_pdf(double omega, MarginalOmegaParams p) {
  return std::exp(marginal_omega_logpdf(omega, p));
}

double marginal_omega_at_zero(MarginalOmegaParams p) {
  check(p);
  if (p.A <= 0.5) {
    return kInf;
  }
  return std::exp(std::lgamma(p.A - 0.5) - std::lgamma(p.A)) /
         std::sqrt(2.0 * std::numbers::pi * p.S);
}

}  // namespace hsvar::special
