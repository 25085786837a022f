#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hsvar {

/// Observed series (rows are periods) and deterministic terms aligned with them.
struct TimeSeriesData {
  Eigen::MatrixXd Y;
  Eigen::MatrixXd D;
  std::vector<std::string> names;
  std::vector<std::string> deterministic_names;

  Eigen::Index T() const { return Y.rows(); }
  Eigen::Index N() const { return Y.cols(); }
  Eigen::Index d() const { return D.cols(); }
};

struct ModelConfig {
  int p = 1;
  /// One flag per variable; stationary variables get a zero prior mean on
  /// their own first lag, the others a unit mean.
  std::vector<bool> stationary_flags;
};

struct PriorConfig {
  double S_omega = 0.05;
  double A_omega = 1.0;
  double nu_0 = 10.0;
  double nu_gamma0 = 10.0;
  double s_s0 = 100.0;
  double nu_s0 = 1.0;
  double nu_A = 10.0;
  double nu_gammaA = 10.0;
  double s_sA = 10.0;
  double nu_sA = 10.0;
  /// Diagonal of the prior covariance shape for each row of A. Empty means
  /// the lag-decay default of minnesota_omega_diag.
  std::vector<double> omega_bar;
};

/// (1 ... 1, 1/2 ... 1/2, ..., 1/p ... 1/p, 100 ... 100): N entries per lag
/// and one inflated entry per deterministic column.
Eigen::VectorXd minnesota_omega_diag(int N, int p, int d);

/// Resolved diagonal of the A-row prior covariance shape.
Eigen::VectorXd omega_bar_diag(const PriorConfig& priors, int N, int p, int d);

struct SvEquationState {
  Eigen::VectorXd h;  ///< h_1..h_T; h_0 = 0 is implicit
  double omega = 0.1;
  double rho = 0.5;
  double sigma2_omega = 0.05;
  std::vector<int> s;  ///< mixture component per period, 0-based
};

struct Hyperparameters {
  Eigen::VectorXd gamma_0;
  Eigen::VectorXd s_0;
  double s_gamma0 = 1.0;
  Eigen::VectorXd gamma_A;
  Eigen::VectorXd s_A;
  double s_gammaA = 1.0;
};

struct StructuralState {
  Eigen::MatrixXd B0;
  Eigen::MatrixXd A;
  std::vector<SvEquationState> sv;
  Hyperparameters hyper;

  Eigen::Index N() const { return B0.rows(); }
};

/// Conditional posterior mean and variance of omega for one equation in one
/// draw. The normal ordinate at zero of this pair feeds the density ratio.
struct OmegaMoments {
  double mean;
  double var;
};

struct PosteriorMeta {
  std::uint64_t seed = 0;
  int chain = 0;
  int n_burn = 0;
  int thin = 1;
};

struct PosteriorSample {
  std::vector<StructuralState> draws;
  std::vector<std::vector<OmegaMoments>> sddr_moments;  ///< [draw][equation]
  PosteriorMeta meta;
};

struct MixtureComponent {
  double prob;
  double mean;
  double var;
};

/// Ten-component normal mixture approximating the log chi-square(1) law.
extern const std::array<MixtureComponent, 10> kLogChi2Mixture;

struct Regressors {
  Eigen::MatrixXd Yt;  ///< T - p rows of y_t
  Eigen::MatrixXd X;   ///< matching rows of (y_{t-1}', ..., y_{t-p}', d_t')
};

Regressors build_regressors(const TimeSeriesData& data, const ModelConfig& cfg);

/// [D | 0] with D = diag(1 for nonstationary, 0 for stationary).
Eigen::MatrixXd prior_mean_A(const ModelConfig& cfg, int d);

/// Split A = [A_1 ... A_p A_d] into its lag blocks.
std::vector<Eigen::MatrixXd> lag_matrices(const Eigen::MatrixXd& A, int p);

/// Empty when every invariant of the state holds; otherwise one message per
/// violated field and bound.
std::vector<std::string> validate_state(const StructuralState& s);

/// Throws InputError when the data cannot support the configured model.
void validate_data(const TimeSeriesData& data, const ModelConfig& cfg);

}  // namespace hsvar
