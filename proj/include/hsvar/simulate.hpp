#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hsvar/model.hpp"
#include "hsvar/rng.hpp"

namespace hsvar::sim {

struct DgpSpec {
  Eigen::MatrixXd B0;
  Eigen::MatrixXd A;  ///< N x (N p + d), d = 1 with a constant
  Eigen::VectorXd omega;
  Eigen::VectorXd rho;
  int T = 300;
  int p = 1;
  bool constant = true;
  std::uint64_t seed = 1;
  bool allow_unstable = false;
};

struct SimulationResult {
  /// T + p rows; the first p are the zero presample.
  TimeSeriesData data;
  Eigen::MatrixXd h;       ///< T x N, periods 1..T
  Eigen::MatrixXd w;       ///< T x N structural shocks
  Eigen::MatrixXd sigma2;  ///< T x N conditional variances
};

/// Spectral radius of the VAR companion matrix built from the lag blocks of A.
double companion_spectral_radius(const Eigen::MatrixXd& A, int p);

/// Throws DomainError for an invalid or (unless allowed) explosive spec.
void validate_spec(const DgpSpec& spec);

SimulationResult generate(const DgpSpec& spec);

/// "heteroskedastic": N = 2, T = 300, p = 1, omega = (0.8, 0).
/// "homoskedastic": the same system with omega = (0, 0).
DgpSpec preset(const std::string& name);
std::vector<std::string> preset_names();

struct SigmaCheckOptions {
  int n_rep = 100000;
  /// Draw omega ~ N(0, sigma2_omega) per replication instead of using spec.omega(n).
  bool random_omega = false;
  double sigma2_omega = 0.05;
};

struct SigmaCheckResult {
  double ks_statistic = 0.0;
  double p_value = 0.0;
  double variance_factor = 0.0;  ///< (1 - rho^{2t}) / (1 - rho^2)
  int n_rep = 0;
};

/// Kolmogorov distance between Monte-Carlo draws of sigma^2_{n.t} and the
/// implied lognormal (fixed omega) or log normal-product (random omega) law.
SigmaCheckResult empirical_sigma_check(const DgpSpec& spec, int n, int t,
                                       const SigmaCheckOptions& opts, Rng& rng);

/// One-sample Kolmogorov statistic of draws against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> x, Cdf cdf);

/// Asymptotic Kolmogorov survival probability P(sqrt(n) D_n > sqrt(n) d).
double kolmogorov_pvalue(double d, int n);

}  // namespace hsvar::sim

#include <algorithm>

namespace hsvar::sim {

template <class Cdf>
double ks_statistic(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace hsvar::sim
