#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "hsvar/model.hpp"
#include "hsvar/rng.hpp"

namespace hsvar {

struct GibbsConfig {
  int n_burn = 1000;
  int n_keep = 1000;
  int thin = 1;
  std::uint64_t seed = 1;
  int chain = 0;
  /// Skip every term involving the data; the chain then targets the prior.
  bool prior_only = false;
  /// Keep h paths in the stored draws (mixture indicators are never kept).
  bool store_h = true;
  /// Offset inside log(w^2 + offset).
  double log_w2_offset = 1e-10;
  /// Hold every rho at this value instead of sampling it.
  std::optional<double> fixed_rho;
  /// Draw sigma2_omega from its GIG conditional truncated to (0, 1 - rho^2).
  /// When false the draw is only kept below 1.
  bool truncate_sigma2_omega = true;
};

/// Data and prior quantities shared by all conditional updates.
struct SamplerContext {
  Eigen::MatrixXd Yt;
  Eigen::MatrixXd X;
  Eigen::MatrixXd A_prior_mean;
  Eigen::VectorXd omega_bar;
  PriorConfig priors;
  int p = 1;
  bool prior_only = false;
  double log_w2_offset = 1e-10;
  bool truncate_sigma2_omega = true;

  Eigen::Index T() const { return Yt.rows(); }
  Eigen::Index N() const { return Yt.cols(); }
  Eigen::Index K() const { return X.cols(); }
};

SamplerContext make_context(const TimeSeriesData& data, const ModelConfig& cfg,
                            const PriorConfig& priors, const GibbsConfig& gcfg);

/// Starting point: ridge least-squares A, B0 from the inverse Cholesky factor
/// of the residual covariance, flat volatility at omega = 0.1, rho = 0.5,
/// sigma2_omega = 0.05, hyperparameters at the centre of their priors and
/// mixture indicators at the most probable component.
StructuralState initial_state(const SamplerContext& ctx);

/// Symmetric tridiagonal matrix: diag(t) = P(t,t), off(t) = P(t,t+1).
struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;
};

/// omega^2 diag(inv_var) + H_rho' H_rho.
Tridiagonal h_posterior_precision(double rho, double omega, const Eigen::VectorXd& inv_var);

/// Draw from N(P^-1 b, P^-1) in O(T) through the bidiagonal Cholesky factor.
/// Consumes exactly T standard normals.
Eigen::VectorXd sample_tridiagonal_gaussian(const Tridiagonal& P, const Eigen::VectorXd& b,
                                            Rng& rng);

/// Dense reference for the same law; consumes the normals in the same order.
Eigen::VectorXd sample_dense_gaussian(const Eigen::MatrixXd& P, const Eigen::VectorXd& b,
                                      Rng& rng);

Eigen::MatrixXd tridiagonal_to_dense(const Tridiagonal& P);

/// Degrees of freedom of the gamma_0 conditional: nu_0 plus the number of
/// entries in a row of B0.
double gamma0_posterior_dof(const PriorConfig& priors, int N);

/// Conditional variances exp(omega_n h_{n.t}) as a T x N matrix.
Eigen::MatrixXd conditional_variances(const StructuralState& s, Eigen::Index T);

/// Structural shocks w_t = B0 (y_t - A x_t) as a T x N matrix.
Eigen::MatrixXd structural_shocks(const StructuralState& s, const SamplerContext& ctx);

void sample_B0(StructuralState& s, const SamplerContext& ctx, Rng& rng);
void sample_A_row(int n, StructuralState& s, const SamplerContext& ctx, Rng& rng);
void sample_hyper_B0(StructuralState& s, const SamplerContext& ctx, Rng& rng);
void sample_hyper_A(StructuralState& s, const SamplerContext& ctx, Rng& rng);

void sample_mixture_indicators(SvEquationState& e, const Eigen::VectorXd& w_tilde, bool use_data,
                               Rng& rng);
void sample_h(SvEquationState& e, const Eigen::VectorXd& w_tilde, bool use_data, Rng& rng);
OmegaMoments sample_omega(SvEquationState& e, const Eigen::VectorXd& w_tilde, bool use_data,
                          Rng& rng);
void asis_interweave(SvEquationState& e, Rng& rng);
void sample_rho(SvEquationState& e, Rng& rng);
void sample_sigma2_omega(SvEquationState& e, const PriorConfig& priors, bool truncate, Rng& rng);

struct SvSweepOptions {
  bool use_data = true;
  bool truncate_sigma2_omega = true;
  std::optional<double> fixed_rho;
};

/// One pass over the volatility block of a single equation in the fixed order
/// mixture -> h -> omega -> interweaving -> rho -> sigma2_omega.
OmegaMoments sv_sweep(SvEquationState& e, const Eigen::VectorXd& w_tilde,
                      const PriorConfig& priors, const SvSweepOptions& opt, Rng& rng);

/// log(w^2 + offset) elementwise.
Eigen::VectorXd log_squared(const Eigen::VectorXd& w, double offset);

PosteriorSample run_chain(const TimeSeriesData& data, const ModelConfig& cfg,
                          const PriorConfig& priors, const GibbsConfig& gcfg);

}  // namespace hsvar
