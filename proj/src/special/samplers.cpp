#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hsvar/special.hpp"

namespace hsvar::special {
namespace {

// Mode of the standardized GIG density x^(lambda-1) exp(-beta (x + 1/x) / 2).
double gig_mode(double lambda, double beta) {
  if (lambda >= 1.0) {
    return (std::sqrt((lambda - 1.0) * (lambda - 1.0) + beta * beta) + (lambda - 1.0)) / beta;
  }
  return beta / (std::sqrt((1.0 - lambda) * (1.0 - lambda) + beta * beta) + (1.0 - lambda));
}

// Ratio-of-uniforms without mode shift.
double gig_rou_noshift(double lambda, double beta, Rng& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * beta;
  const double xm = gig_mode(lambda, beta);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  const double ym =
      ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + beta * beta)) / beta;
  const double um = std::exp(0.5 * (lambda + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);
  double x;
  for (;;) {
    const double u = um * rng.uniform();
    const double v = rng.uniform();
    x = u / v;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) {
      break;
    }
  }
  return x;
}

// Ratio-of-uniforms with the mode shifted to the origin; the bounding box
// comes from the two real roots of a cubic.
double gig_rou_shift(double lambda, double beta, Rng& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * beta;
  const double xm = gig_mode(lambda, beta);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);

  const double a = -(2.0 * (lambda + 1.0) / beta + xm);
  const double b = 2.0 * (lambda - 1.0) * xm / beta - 1.0;
  const double c = xm;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double fi = std::acos(-q / (2.0 * std::sqrt(-(p * p * p) / 27.0)));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;
  const double y2 = fak * std::cos(fi / 3.0 + 4.0 / 3.0 * std::numbers::pi) - a / 3.0;
  const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
  const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);

  double x;
  for (;;) {
    const double u = uminus + rng.uniform() * (uplus - uminus);
    const double v = rng.uniform();
    x = u / v + xm;
    if (x > 0.0 && std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) {
      break;
    }
  }
  return x;
}

// Three-piece hat for 0 <= lambda < 1 and small beta.
double gig_three_region(double lambda, double beta, Rng& rng) {
  const double mode = gig_mode(lambda, beta);
  const double x0 = beta / (1.0 - lambda);
  const double xstar = std::max(x0, 2.0 / beta);

  const double k1 = std::exp((lambda - 1.0) * std::log(mode) - 0.5 * beta * (mode + 1.0 / mode));
  const double A1 = k1 * x0;
  double k2 = 0.0;
  double A2 = 0.0;
  if (x0 < 2.0 / beta) {
    k2 = std::exp(-beta);
    A2 = lambda == 0.0 ? k2 * std::log(2.0 / (beta * beta))
                       : k2 / lambda * (std::pow(2.0 / beta, lambda) - std::pow(x0, lambda));
  }
  const double k3 = std::pow(xstar, lambda - 1.0);
  const double A3 = 2.0 * k3 * std::exp(-xstar * beta / 2.0) / beta;
  const double Atot = A1 + A2 + A3;

  for (;;) {
    double v = Atot * rng.uniform();
    double x;
    double hx;
    if (v <= A1) {
      x = x0 * v / A1;
      hx = k1;
    } else if ((v -= A1) <= A2) {
      if (lambda == 0.0) {
        x = beta * std::exp(std::exp(beta) * v);
        hx = k2 / x;
      } else {
        x = std::pow(std::pow(x0, lambda) + lambda / k2 * v, 1.0 / lambda);
        hx = k2 * std::pow(x, lambda - 1.0);
      }
    } else {
      v -= A2;
      x = -2.0 / beta * std::log(std::exp(-xstar * beta / 2.0) - beta / (2.0 * k3) * v);
      hx = k3 * std::exp(-x * beta / 2.0);
    }
    const double u = rng.uniform() * hx;
    if (std::log(u) <= (lambda - 1.0) * std::log(x) - beta / 2.0 * (x + 1.0 / x)) {
      return x;
    }
  }
}

double standard_normal_tail(double a, Rng& rng) {
  // Exponential proposal with the optimal rate for the tail beyond a >= 0.
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a + rng.exponential() / alpha;
    const double d = z - alpha;
    if (rng.uniform() <= std::exp(-0.5 * d * d)) {
      return z;
    }
  }
}

// Standard normal restricted to (a, b) with 0 <= a < b.
double standard_truncnorm_positive(double a, double b, Rng& rng) {
  if (std::isinf(b)) {
    return standard_normal_tail(a, rng);
  }
  const double root = std::sqrt(a * a + 4.0);
  const double uniform_limit =
      a + 2.0 * std::sqrt(std::numbers::e) / (a + root) * std::exp((a * a - a * root) / 4.0);
  if (b <= uniform_limit) {
    for (;;) {
      const double z = a + (b - a) * rng.uniform();
      if (rng.uniform() <= std::exp(0.5 * (a * a - z * z))) {
        return z;
      }
    }
  }
  for (;;) {
    const double z = standard_normal_tail(a, rng);
    if (z < b) {
      return z;
    }
  }
}

// Standard normal restricted to (a, b) with a < 0 < b.
double standard_truncnorm_straddle(double a, double b, Rng& rng) {
  if (b - a >= std::sqrt(2.0 * std::numbers::pi)) {
    for (;;) {
      const double z = rng.normal();
      if (z > a && z < b) {
        return z;
      }
    }
  }
  for (;;) {
    const double z = a + (b - a) * rng.uniform();
    if (rng.uniform() <= std::exp(-0.5 * z * z)) {
      return z;
    }
  }
}

}  // namespace

double sample_gamma(double shape, double scale, Rng& rng) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw DomainError("gamma: shape and scale must be positive");
  }
  return scale * rng.gamma(shape);
}

double sample_ig2(double scale, double dof, Rng& rng) {
  if (!(scale > 0.0) || !(dof > 0.0)) {
    throw DomainError("ig2: scale and dof must be positive");
  }
  return scale / (2.0 * rng.gamma(0.5 * dof));
}

double sample_inverse_gaussian(double mean, double shape, Rng& rng) {
  if (!(mean > 0.0) || !(shape > 0.0)) {
    throw DomainError("inverse gaussian: mean and shape must be positive");
  }
  const double nu = rng.normal();
  const double y = nu * nu;
  const double my = mean * y;
  const double d = std::sqrt(4.0 * mean * shape * y + my * my);
  // Smaller root of the quadratic, written without cancellation.
  const double x = 4.0 * mean * mean * shape * y / ((d + my) * (d + my));
  const double smaller = y == 0.0 ? mean : x;
  if (rng.uniform() <= mean / (mean + smaller)) {
    return smaller;
  }
  return mean * mean / smaller;
}

double sample_gig(double lambda, double chi, double psi, Rng& rng) {
  if (chi < 0.0 || psi < 0.0 || !std::isfinite(chi) || !std::isfinite(psi) ||
      !std::isfinite(lambda)) {
    throw DomainError("gig: chi and psi must be finite and nonnegative");
  }
  if (chi == 0.0 && psi == 0.0) {
    throw DomainError("gig: chi and psi cannot both be zero");
  }
  const double beta = std::sqrt(chi * psi);
  if (chi == 0.0 || (beta < 1e-8 && lambda > 0.0 && psi > 0.0)) {
    if (!(lambda > 0.0)) {
      throw DomainError("gig: chi = 0 requires lambda > 0, got " + std::to_string(lambda));
    }
    return sample_gamma(lambda, 2.0 / psi, rng);
  }
  if (psi == 0.0 || (beta < 1e-8 && lambda < 0.0)) {
    if (!(lambda < 0.0)) {
      throw DomainError("gig: psi = 0 requires lambda < 0, got " + std::to_string(lambda));
    }
    return 1.0 / sample_gamma(-lambda, 2.0 / chi, rng);
  }
  if (lambda == -0.5) {
    return sample_inverse_gaussian(std::sqrt(chi / psi), chi, rng);
  }
  if (lambda == 0.5) {
    return 1.0 / sample_inverse_gaussian(std::sqrt(psi / chi), psi, rng);
  }

  const double alpha = std::sqrt(chi / psi);
  const double l = std::abs(lambda);
  double x;
  if (l > 2.0 || beta > 3.0) {
    x = gig_rou_shift(l, beta, rng);
  } else if (l >= 1.0 - 2.25 * beta * beta || beta > 0.2) {
    x = gig_rou_noshift(l, beta, rng);
  } else {
    x = gig_three_region(l, beta, rng);
  }
  if (lambda < 0.0) {
    x = 1.0 / x;
  }
  return alpha * x;
}

double gig_mean(double lambda, double chi, double psi) {
  if (chi == 0.0) {
    return 2.0 * lambda / psi;
  }
  if (psi == 0.0) {
    if (!(-lambda > 1.0)) {
      return std::numeric_limits<double>::infinity();
    }
    return chi / (2.0 * (-lambda - 1.0));
  }
  const double beta = std::sqrt(chi * psi);
  return std::sqrt(chi / psi) *
         std::exp(log_bessel_k(lambda + 1.0, beta) - log_bessel_k(lambda, beta));
}

double sample_truncnorm(double mu, double var, double lo, double hi, Rng& rng) {
  if (!(lo < hi)) {
    throw DomainError("truncnorm: lower bound must be below upper bound");
  }
  if (!(var > 0.0)) {
    throw DomainError("truncnorm: variance must be positive");
  }
  const double sd = std::sqrt(var);
  const double a = (lo - mu) / sd;
  const double b = (hi - mu) / sd;
  double z;
  if (a >= 0.0) {
    z = standard_truncnorm_positive(a, b, rng);
  } else if (b <= 0.0) {
    z = -standard_truncnorm_positive(-b, -a, rng);
  } else if (std::isinf(a) && std::isinf(b)) {
    z = rng.normal();
  } else {
    z = standard_truncnorm_straddle(a, b, rng);
  }
  return std::clamp(mu + sd * z, std::nextafter(lo, hi), std::nextafter(hi, lo));
}

Eigen::RowVectorXd sample_generalized_normal_row(const Eigen::MatrixXd& S_bar_inv,
                                                 double nu_bar,
                                                 const Eigen::MatrixXd& B0_others,
                                                 Rng& rng) {
  const Eigen::Index N = S_bar_inv.rows();
  if (S_bar_inv.cols() != N || B0_others.rows() != N - 1 || (N > 1 && B0_others.cols() != N)) {
    throw DomainError("generalized normal row: dimension mismatch");
  }
  if (nu_bar - static_cast<double>(N) + 1.0 <= 0.0) {
    throw DomainError("generalized normal row: nu_bar must exceed N - 1");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(S_bar_inv);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("generalized normal row: precision matrix is not positive definite");
  }

  // w spans the orthogonal complement of the other rows; b * w is det(B0) up to scale.
  Eigen::VectorXd w(N);
  if (N == 1) {
    w(0) = 1.0;
  } else {
    const Eigen::MatrixXd others_t = B0_others.transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(others_t);
    const Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd R = qr.matrixQR().topRows(N - 1).triangularView<Eigen::Upper>();
    const double scale = std::max(1.0, others_t.cwiseAbs().maxCoeff());
    if (R.diagonal().cwiseAbs().minCoeff() <= 1e-13 * scale) {
      throw NumericalError("generalized normal row: conditioning rows are rank deficient");
    }
    w = Q.col(N - 1);
  }

  const auto L = llt.matrixL();
  Eigen::VectorXd u = L.solve(w);
  u.normalize();

  Eigen::VectorXd z(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    z(i) = rng.normal();
  }
  double beta1 = std::sqrt(2.0 * rng.gamma(0.5 * (nu_bar - static_cast<double>(N) + 1.0)));
  if (rng.uniform() < 0.5) {
    beta1 = -beta1;
  }
  const Eigen::VectorXd c = z + (beta1 - z.dot(u)) * u;
  const Eigen::VectorXd b = llt.matrixU().solve(c);
  return b.transpose();
}

}  // namespace hsvar::special
