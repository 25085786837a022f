#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hsvar/gibbs.hpp"
#include "hsvar/model.hpp"

namespace hsvar {

struct NormalizationBenchmark {
  Eigen::MatrixXd B0_hat;
  /// N^2 x N^2 weighting matrix acting on vec((P D B0 - B0_hat)'), i.e. on the
  /// rows stacked one after another. Empty means identity weighting.
  Eigen::MatrixXd Omega_hat;
};

struct IrfResult {
  std::vector<Eigen::MatrixXd> theta;
  int horizon = 0;
};

/// Phi_0 = I, Phi_i = sum_{j=1}^{min(i,p)} A_j Phi_{i-j}.
std::vector<Eigen::MatrixXd> compute_phi(const std::vector<Eigen::MatrixXd>& A_lags, int horizon);

/// Rescale shock `shock` so that it moves `variable` by `value` on impact.
struct ImpactScaling {
  int shock = 0;
  int variable = 0;
  double value = 1.0;
};

IrfResult compute_irf(const StructuralState& draw, int p, int horizon,
                      std::optional<ImpactScaling> scaling = std::nullopt);

/// Row i of the transformed matrix is sign[i] * B0.row(perm[i]).
struct RowTransform {
  std::vector<int> perm;
  std::vector<int> sign;
  double distance = 0.0;
};

double normalization_distance(const Eigen::MatrixXd& B0, const RowTransform& tr,
                              const NormalizationBenchmark& bench);

/// Exhaustive search over all N! permutations and 2^N sign patterns. Among
/// equal distances the lexicographically first (permutation, then signs with
/// + before -) wins, which makes normalization idempotent.
RowTransform best_row_transform(const Eigen::MatrixXd& B0, const NormalizationBenchmark& bench);

Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& B0, const RowTransform& tr);

/// B0 rows, their hyperparameters and the volatility states follow the
/// transform; A is the reduced-form slope and is unchanged.
StructuralState apply_row_transform(const StructuralState& draw, const RowTransform& tr);

StructuralState normalize_draw(const StructuralState& draw, const NormalizationBenchmark& bench);

/// Normalizes every draw and reorders its omega moments alongside.
PosteriorSample normalize_sample(const PosteriorSample& sample, const NormalizationBenchmark& bench);

struct Interval {
  double lower;
  double upper;
};

/// Shortest interval holding ceil(level * n) of the draws.
Interval hpd_interval(std::vector<double> draws, double level);

struct VariancePaths {
  Eigen::MatrixXd mean;   ///< (T+1) x N, row 0 is the fixed initial period
  Eigen::MatrixXd lower;
  Eigen::MatrixXd upper;
};

VariancePaths conditional_variance_paths(const PosteriorSample& sample, double level = 0.90);

/// Posterior mean of w_t = B0 (y_t - A x_t), T x N.
Eigen::MatrixXd posterior_mean_shocks(const PosteriorSample& sample, const SamplerContext& ctx);

/// Pearson correlation between each posterior-mean shock and an instrument;
/// NaN entries of the instrument are skipped.
std::vector<double> shock_instrument_correlation(const PosteriorSample& sample,
                                                 const SamplerContext& ctx,
                                                 const Eigen::VectorXd& instrument);

/// Unnormalized log posterior kernel of a draw; needs the draw's h paths.
double log_posterior_kernel(const StructuralState& draw, const SamplerContext& ctx);

/// Benchmark at the draw with the highest posterior kernel.
NormalizationBenchmark benchmark_from_mode(const PosteriorSample& sample, const SamplerContext& ctx);

/// diag(sigma)^-1 * M1^-1 * M2.
Eigen::MatrixXd three_matrix_benchmark(const Eigen::VectorXd& sigma, const Eigen::MatrixXd& M1,
                                       const Eigen::MatrixXd& M2);

}  // namespace hsvar
