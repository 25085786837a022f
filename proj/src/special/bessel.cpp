#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hsvar/special.hpp"

namespace hsvar::special {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 100000;

// Taylor coefficients of 1/Gamma(z) about 0: 1/Gamma(z) = sum_k c[k] z^k.
constexpr std::array<double, 31> kRecipGamma = {
    0.0,
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19,
    1.7144063219273374334e-20,
};

// Temme's gamma helpers for |mu| <= 1/2:
//   gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu),  gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
struct TemmeGammas {
  double gam1, gam2, gampl, gammi;
};

TemmeGammas temme_gammas(double mu) {
  // 1/Gamma(1+mu) = sum_{k>=1} c_k mu^(k-1); split by parity of k.
  double odd = 0.0;   // sum_{k odd}  c_k mu^(k-1)
  double even = 0.0;  // sum_{k even} c_k mu^(k-2)
  const double mu2 = mu * mu;
  for (int k = static_cast<int>(kRecipGamma.size()) - 1; k >= 1; --k) {
    if (k % 2 == 1) {
      odd = odd * mu2 + kRecipGamma[k];
    } else {
      even = even * mu2 + kRecipGamma[k];
    }
  }
  TemmeGammas g{};
  g.gam1 = -even;
  g.gam2 = odd;
  g.gampl = odd + mu * even;
  g.gammi = odd - mu * even;
  return g;
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, scaled by exp(x) when `scaled`.
struct KPair {
  double k_mu, k_mu1;
  bool scaled;
};

KPair k_pair_series(double mu, double x) {
  const double x2 = 0.5 * x;
  const double pimu = std::numbers::pi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  const TemmeGammas g = temme_gammas(mu);
  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / g.gampl;
  double q = 0.5 / (e * g.gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  const double mu2 = mu * mu;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double di = i;
    ff = (di * ff + p + q) / (di * di - mu2);
    c *= d / di;
    p /= (di - mu);
    q /= (di + mu);
    const double del = c * ff;
    sum += del;
    const double del1 = c * (p - di * ff);
    sum1 += del1;
    if (std::abs(del) < std::abs(sum) * kEps && std::abs(del1) < std::abs(sum1) * kEps) {
      break;
    }
  }
  return {sum, sum1 * (2.0 / x), false};
}

// Steed's continued fraction (CF2) for x >= 2, returning exp(x)-scaled values.
KPair k_pair_cf2(double mu, double x) {
  const double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= kMaxIter; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) {
      break;
    }
  }
  h = a1 * h;
  const double k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
  return {k_mu, k_mu1, true};
}

// Below this the two leading ascending-series terms are exact to double precision.
constexpr double kTinyArgument = 1e-20;

double log_bessel_k_tiny(double nu, double x) {
  constexpr double kEuler = 0.57721566490153286061;
  const double L = std::numbers::ln2 - std::log(x);  // log(2 / x), finite for denormal x
  if (nu == 0.0) {
    return std::log(L - kEuler);
  }
  if (nu < 1e-8) {
    // Gamma(+-nu) ~ +-1/nu - gamma folds the two terms together.
    return std::log(std::sinh(nu * L) / nu - kEuler * std::cosh(nu * L));
  }
  const double lead = std::lgamma(nu) - std::numbers::ln2 + nu * L;
  if (nu >= 1.0) {
    return lead;
  }
  // K = (Gamma(nu) (2/x)^nu + Gamma(-nu) (x/2)^nu) / 2 with Gamma(-nu) < 0.
  const double ratio = -std::exp(std::lgamma(-nu) - std::lgamma(nu) - 2.0 * nu * L);
  return lead + std::log1p(ratio);
}

}  // namespace

double log_bessel_k(double nu, double x) {
  if (!(x > 0.0)) {
    throw DomainError("bessel_k: argument must be positive, got " + std::to_string(x));
  }
  if (std::isinf(x)) {
    return -std::numeric_limits<double>::infinity();
  }
  nu = std::abs(nu);
  if (x < kTinyArgument) {
    return log_bessel_k_tiny(nu, x);
  }
  const int nl = static_cast<int>(std::floor(nu + 0.5));
  const double mu = nu - nl;

  KPair kp = x < 2.0 ? k_pair_series(mu, x) : k_pair_cf2(mu, x);
  double log_scale = kp.scaled ? -x : 0.0;
  if (nl == 0) {
    return std::log(kp.k_mu) + log_scale;
  }

  // Forward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m is stable for K.
  constexpr double kBig = 1e250;
  const double log_big = std::log(kBig);
  double k0 = kp.k_mu;
  double k1 = kp.k_mu1;
  const double xi2 = 2.0 / x;
  for (int i = 1; i < nl; ++i) {
    const double k2 = (mu + i) * xi2 * k1 + k0;
    k0 = k1;
    k1 = k2;
    if (k1 > kBig) {
      k0 /= kBig;
      k1 /= kBig;
      log_scale += log_big;
    }
  }
  return std::log(k1) + log_scale;
}

BesselResult bessel_k_checked(double nu, double x) {
  const double lk = log_bessel_k(nu, x);
  if (lk > std::log(std::numeric_limits<double>::max())) {
    return {std::numeric_limits<double>::infinity(), BesselStatus::overflow};
  }
  const double v = std::exp(lk);
  if (v == 0.0) {
    return {0.0, BesselStatus::underflow};
  }
  return {v, BesselStatus::ok};
}

double bessel_k(double nu, double x) { return bessel_k_checked(nu, x).value; }

}  // namespace hsvar::special
