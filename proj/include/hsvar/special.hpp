#pragma once

// Special functions, the normal-product density families and the
// non-standard variate generators used by the sampler.

#include <Eigen/Dense>
#include <span>

#include "hsvar/errors.hpp"
#include "hsvar/rng.hpp"

namespace hsvar::special {

// ---------------------------------------------------------------------------
// Modified Bessel function of the second kind
// ---------------------------------------------------------------------------

enum class BesselStatus { ok, overflow, underflow };

struct BesselResult {
  double value;
  BesselStatus status;
};

/// log K_nu(x) for real order and x > 0. Finite wherever K is, even when K
/// itself over- or underflows a double.
double log_bessel_k(double nu, double x);

/// K_nu(x) with an explicit range flag. Overflow yields +inf, underflow 0.
BesselResult bessel_k_checked(double nu, double x);

/// K_nu(x); throws DomainError for x <= 0.
double bessel_k(double nu, double x);

// ---------------------------------------------------------------------------
// Normal-product and log-normal-product families
// ---------------------------------------------------------------------------

struct NormalProductParams {
  double sigma2;  ///< variance of the product variable
};

struct MvNormalProductParams {
  double sigma2;
  Eigen::MatrixXd Sigma;
};

/// Hyperparameters of the Gamma(scale S, shape A) mixing law for the
/// variance of omega.
struct MarginalOmegaParams {
  double S;
  double A;
};

/// Density of z = x*y for independent zero-mean normals; +inf at z = 0.
double np_pdf(double z, NormalProductParams p);
double np_logpdf(double z, NormalProductParams p);

/// Distribution function of the normal-product law.
double np_cdf(double z, NormalProductParams p);

/// Probability mass of the normal-product law on (-eps, eps). Evaluated from
/// the power series of the K0 integral, so it is exact around the pole.
double np_central_mass(double eps, NormalProductParams p);

/// Density of q = exp(z), z normal-product; +inf at q = 1.
double lognp_pdf(double q, NormalProductParams p);
double lognp_logpdf(double q, NormalProductParams p);
double lognp_cdf(double q, NormalProductParams p);

/// Log density of Z = x*Y with x ~ N(0, sigma2) and Y ~ N_T(0, Sigma).
double mnp_logpdf(std::span<const double> Z, const MvNormalProductParams& p);

/// Log density of Q = exp(Z) elementwise, Z multivariate normal-product.
double mlognp_logpdf(std::span<const double> Q, const MvNormalProductParams& p);

/// Marginal density of omega after integrating its normal variance against
/// the unrestricted Gamma(S, A) prior.
double marginal_omega_pdf(double omega, MarginalOmegaParams p);
double marginal_omega_logpdf(double omega, MarginalOmegaParams p);

/// Limit of marginal_omega_pdf at omega -> 0; +inf when A <= 0.5.
double marginal_omega_at_zero(MarginalOmegaParams p);

// ---------------------------------------------------------------------------
// Random variates
// ---------------------------------------------------------------------------

/// Generalized inverse Gaussian with density proportional to
/// x^(lambda-1) exp(-(chi/x + psi*x)/2).
double sample_gig(double lambda, double chi, double psi, Rng& rng);

/// Mean of the GIG law, used by the moment tests.
double gig_mean(double lambda, double chi, double psi);

/// N(mu, var) restricted to (lo, hi); either bound may be infinite.
double sample_truncnorm(double mu, double var, double lo, double hi, Rng& rng);

/// Inverse Gaussian with the given mean and shape.
double sample_inverse_gaussian(double mean, double shape, Rng& rng);

/// Gamma with shape and scale.
double sample_gamma(double shape, double scale, Rng& rng);

/// Inverted-gamma 2 with scale s and degrees of freedom nu:
/// density proportional to x^(-(nu+2)/2) exp(-s / (2x)).
double sample_ig2(double scale, double dof, Rng& rng);

/// One row b of B0 from the kernel |det B0|^(nu_bar - N) exp(-b S^-1 b' / 2),
/// the other rows held fixed. `B0_others` stacks those N-1 rows.
Eigen::RowVectorXd sample_generalized_normal_row(const Eigen::MatrixXd& S_bar_inv,
                                                 double nu_bar,
                                                 const Eigen::MatrixXd& B0_others,
                                                 Rng& rng);

}  // namespace hsvar::special
