#include "hsvar/sddr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hsvar/errors.hpp"
#include "hsvar/special.hpp"

namespace hsvar {
namespace {

double log_normal_ordinate_at_zero(const OmegaMoments& m) {
  if (!(m.var > 0.0) || !std::isfinite(m.var)) {
    throw DomainError("omega moments: variance must be positive and finite");
  }
  return -0.5 * std::log(2.0 * std::numbers::pi * m.var) - 0.5 * m.mean * m.mean / m.var;
}

double log_mean_ordinate(std::vector<OmegaMoments>::const_iterator first,
                         std::vector<OmegaMoments>::const_iterator last) {
  if (first == last) {
    throw DomainError("omega moments: empty sequence");
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (auto it = first; it != last; ++it) {
    mx = std::max(mx, log_normal_ordinate_at_zero(*it));
  }
  double acc = 0.0;
  for (auto it = first; it != last; ++it) {
    acc += std::exp(log_normal_ordinate_at_zero(*it) - mx);
  }
  return mx + std::log(acc / static_cast<double>(last - first));
}

}  // namespace

double log_posterior_ordinate_at_zero(const std::vector<OmegaMoments>& moments) {
  return log_mean_ordinate(moments.begin(), moments.end());
}

double posterior_ordinate_at_zero(const std::vector<OmegaMoments>& moments) {
  return std::exp(log_posterior_ordinate_at_zero(moments));
}

double prior_ordinate_at_zero(const PriorConfig& priors) {
  if (!(priors.A_omega > 0.5)) {
    throw VerificationInfeasible(
        "prior ordinate of omega at zero is unbounded for A_omega <= 0.5 (got " +
        std::to_string(priors.A_omega) + ")");
  }
  return special::marginal_omega_at_zero({priors.S_omega, priors.A_omega});
}

std::vector<OmegaMoments> equation_moments(const PosteriorSample& sample, int equation) {
  std::vector<OmegaMoments> out;
  out.reserve(sample.sddr_moments.size());
  for (const auto& row : sample.sddr_moments) {
    if (equation < 0 || equation >= static_cast<int>(row.size())) {
      throw DomainError("equation index out of range");
    }
    out.push_back(row[static_cast<std::size_t>(equation)]);
  }
  return out;
}

std::pair<double, double> sddr_nse(const std::vector<OmegaMoments>& moments, int n_subsamples,
                                   const PriorConfig& priors) {
  if (n_subsamples < 2) {
    throw DomainError("sddr_nse: at least two subsamples are required");
  }
  const auto S = static_cast<int>(moments.size());
  if (S < n_subsamples) {
    throw DomainError("sddr_nse: " + std::to_string(S) + " draws cannot fill " +
                      std::to_string(n_subsamples) + " subsamples");
  }
  const double log_den = std::log(prior_ordinate_at_zero(priors));
  const int len = S / n_subsamples;
  std::vector<double> vals(static_cast<std::size_t>(n_subsamples));
  double mean = 0.0;
  for (int b = 0; b < n_subsamples; ++b) {
    const auto first = moments.begin() + static_cast<std::ptrdiff_t>(b) * len;
    vals[b] = log_mean_ordinate(first, first + len) - log_den;
    mean += vals[b];
  }
  mean /= n_subsamples;
  double ss = 0.0;
  for (double v : vals) {
    ss += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(ss / (n_subsamples - 1));
  return {sd / std::sqrt(static_cast<double>(n_subsamples)), sd};
}

SddrResult compute_sddr(const std::vector<OmegaMoments>& moments, const PriorConfig& priors,
                        int n_subsamples) {
  SddrResult r;
  r.log_denominator = std::log(prior_ordinate_at_zero(priors));
  r.log_numerator = log_posterior_ordinate_at_zero(moments);
  r.log_sddr = r.log_numerator - r.log_denominator;
  r.n_draws = static_cast<int>(moments.size());
  if (r.n_draws >= n_subsamples && n_subsamples >= 2) {
    std::tie(r.nse, r.batch_sd) = sddr_nse(moments, n_subsamples, priors);
    r.n_subsamples = n_subsamples;
  }
  return r;
}

SddrResult compute_sddr(const PosteriorSample& sample, int equation, const PriorConfig& priors,
                        int n_subsamples) {
  return compute_sddr(equation_moments(sample, equation), priors, n_subsamples);
}

std::string evidence_category(double log_sddr) {
  if (log_sddr < -20.0) {
    return "strong";
  }
  if (log_sddr < -3.0) {
    return "positive";
  }
  if (log_sddr < 0.0) {
    return "weak";
  }
  return "none";
}

}  // namespace hsvar
