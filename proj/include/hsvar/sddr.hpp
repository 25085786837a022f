#pragma once

#include <string>
#include <vector>

#include "hsvar/model.hpp"

namespace hsvar {

struct SddrResult {
  double log_numerator = 0.0;
  double log_denominator = 0.0;
  double log_sddr = 0.0;
  double nse = 0.0;       ///< batch standard deviation / sqrt(n_subsamples)
  double batch_sd = 0.0;  ///< standard deviation of the batch log ratios
  int n_draws = 0;
  int n_subsamples = 0;
};

/// log of (1/S) sum_s N(0; mean_s, var_s), accumulated by log-sum-exp.
double log_posterior_ordinate_at_zero(const std::vector<OmegaMoments>& moments);
double posterior_ordinate_at_zero(const std::vector<OmegaMoments>& moments);

/// Marginal prior ordinate of omega at zero; throws VerificationInfeasible
/// when A_omega <= 0.5 because the ordinate is unbounded.
double prior_ordinate_at_zero(const PriorConfig& priors);

/// Moment sequence of one equation across the stored draws.
std::vector<OmegaMoments> equation_moments(const PosteriorSample& sample, int equation);

/// Batch-means standard error of the log ratio over contiguous batches.
/// Returns {nse, batch_sd}.
std::pair<double, double> sddr_nse(const std::vector<OmegaMoments>& moments, int n_subsamples,
                                   const PriorConfig& priors);

SddrResult compute_sddr(const std::vector<OmegaMoments>& moments, const PriorConfig& priors,
                        int n_subsamples = 30);
SddrResult compute_sddr(const PosteriorSample& sample, int equation, const PriorConfig& priors,
                        int n_subsamples = 30);

/// Evidence against homoskedasticity on the log scale: "strong" below -20,
/// "positive" below -3, "weak" below 0, otherwise "none".
std::string evidence_category(double log_sddr);

}  // namespace hsvar
