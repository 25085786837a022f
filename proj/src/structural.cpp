#include "hsvar/structural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hsvar/errors.hpp"

namespace hsvar {
namespace {

constexpr int kMaxNormalizeN = 8;
constexpr int kMaxFullWeightN = 6;

bool is_row_block_diagonal(const Eigen::MatrixXd& M, Eigen::Index N) {
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      if (r / N != c / N && M(r, c) != 0.0) {
        return false;
      }
    }
  }
  return true;
}

Eigen::MatrixXd weight_inverse(const NormalizationBenchmark& bench, Eigen::Index N) {
  if (bench.Omega_hat.size() == 0) {
    return Eigen::MatrixXd();
  }
  if (bench.Omega_hat.rows() != N * N || bench.Omega_hat.cols() != N * N) {
    throw DomainError("normalization: Omega_hat must be N^2 x N^2");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(bench.Omega_hat);
  if (llt.info() != Eigen::Success) {
    throw DomainError("normalization: Omega_hat is not positive definite");
  }
  return llt.solve(Eigen::MatrixXd::Identity(N * N, N * N));
}

double row_cost(const Eigen::RowVectorXd& diff, const Eigen::MatrixXd& Winv, Eigen::Index i,
                Eigen::Index N) {
  if (Winv.size() == 0) {
    return diff.squaredNorm();
  }
  const auto block = Winv.block(i * N, i * N, N, N);
  return diff * block * diff.transpose();
}

double full_cost(const Eigen::MatrixXd& B, const Eigen::MatrixXd& B_hat,
                 const Eigen::MatrixXd& Winv) {
  const Eigen::Index N = B.rows();
  Eigen::VectorXd v(N * N);
  for (Eigen::Index i = 0; i < N; ++i) {
    v.segment(i * N, N) = (B.row(i) - B_hat.row(i)).transpose();
  }
  if (Winv.size() == 0) {
    return v.squaredNorm();
  }
  return v.dot(Winv * v);
}

}  // namespace

std::vector<Eigen::MatrixXd> compute_phi(const std::vector<Eigen::MatrixXd>& A_lags, int horizon) {
  if (horizon < 0) {
    throw DomainError("compute_phi: horizon must be nonnegative");
  }
  const Eigen::Index N = A_lags.empty() ? 0 : A_lags.front().rows();
  if (A_lags.empty()) {
    throw DomainError("compute_phi: at least one lag matrix is required");
  }
  const int p = static_cast<int>(A_lags.size());
  std::vector<Eigen::MatrixXd> phi;
  phi.reserve(static_cast<std::size_t>(horizon) + 1);
  phi.push_back(Eigen::MatrixXd::Identity(N, N));
  for (int i = 1; i <= horizon; ++i) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(N, N);
    for (int j = 1; j <= std::min(i, p); ++j) {
      acc += A_lags[j - 1] * phi[i - j];
    }
    phi.push_back(std::move(acc));
  }
  return phi;
}

IrfResult compute_irf(const StructuralState& draw, int p, int horizon,
                      std::optional<ImpactScaling> scaling) {
  const Eigen::Index N = draw.B0.rows();
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(draw.B0);
  if (!lu.isInvertible()) {
    throw DomainError("compute_irf: B0 is singular");
  }
  const Eigen::MatrixXd B = lu.inverse();
  const auto phi = compute_phi(lag_matrices(draw.A, p), horizon);
  IrfResult r;
  r.horizon = horizon;
  r.theta.reserve(phi.size());
  for (const auto& P : phi) {
    r.theta.push_back(P * B);
  }
  if (scaling) {
    if (scaling->shock < 0 || scaling->shock >= N || scaling->variable < 0 ||
        scaling->variable >= N) {
      throw DomainError("compute_irf: scaling indices out of range");
    }
    const double impact = r.theta[0](scaling->variable, scaling->shock);
    if (impact == 0.0) {
      throw DomainError("compute_irf: zero impact response cannot be rescaled");
    }
    const double f = scaling->value / impact;
    for (auto& T : r.theta) {
      T.col(scaling->shock) *= f;
    }
  }
  return r;
}

Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& B0, const RowTransform& tr) {
  Eigen::MatrixXd out(B0.rows(), B0.cols());
  for (Eigen::Index i = 0; i < B0.rows(); ++i) {
    out.row(i) = B0.row(tr.perm[i]);
    if (tr.sign[i] < 0) {
      out.row(i) = -out.row(i);
    }
  }
  return out;
}

double normalization_distance(const Eigen::MatrixXd& B0, const RowTransform& tr,
                              const NormalizationBenchmark& bench) {
  const Eigen::MatrixXd Winv = weight_inverse(bench, B0.rows());
  return full_cost(apply_rows(B0, tr), bench.B0_hat, Winv);
}

RowTransform best_row_transform(const Eigen::MatrixXd& B0, const NormalizationBenchmark& bench) {
  const Eigen::Index N = B0.rows();
  if (B0.cols() != N || bench.B0_hat.rows() != N || bench.B0_hat.cols() != N) {
    throw DomainError("normalization: B0 and benchmark must be N x N");
  }
  if (N > kMaxNormalizeN) {
    throw DomainError("normalization: exhaustive search supports N <= " +
                      std::to_string(kMaxNormalizeN) + ", got " + std::to_string(N));
  }
  const Eigen::MatrixXd Winv = weight_inverse(bench, N);
  const bool separable = Winv.size() == 0 || is_row_block_diagonal(Winv, N);

  RowTransform best;
  best.distance = std::numeric_limits<double>::infinity();
  std::vector<int> perm(static_cast<std::size_t>(N));
  std::iota(perm.begin(), perm.end(), 0);

  if (separable) {
    // cost[i][j][k]: new row i taken from old row j with sign (+, -)[k].
    std::vector<double> cost(static_cast<std::size_t>(N * N * 2));
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index j = 0; j < N; ++j) {
        const Eigen::RowVectorXd plus = B0.row(j) - bench.B0_hat.row(i);
        const Eigen::RowVectorXd minus = -B0.row(j) - bench.B0_hat.row(i);
        cost[(i * N + j) * 2] = row_cost(plus, Winv, i, N);
        cost[(i * N + j) * 2 + 1] = row_cost(minus, Winv, i, N);
      }
    }
    std::vector<int> sign(static_cast<std::size_t>(N));
    do {
      double total = 0.0;
      for (Eigen::Index i = 0; i < N; ++i) {
        const double cp = cost[(i * N + perm[i]) * 2];
        const double cm = cost[(i * N + perm[i]) * 2 + 1];
        sign[i] = cm < cp ? -1 : 1;
        total += std::min(cp, cm);
      }
      if (total < best.distance) {
        best.distance = total;
        best.perm = perm;
        best.sign = sign;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    // Report the distance exactly as normalization_distance computes it.
    best.distance = full_cost(apply_rows(B0, best), bench.B0_hat, Winv);
    return best;
  }

  if (N > kMaxFullWeightN) {
    throw DomainError("normalization: a non-block-diagonal Omega_hat supports N <= " +
                      std::to_string(kMaxFullWeightN));
  }
  RowTransform cand;
  cand.sign.assign(static_cast<std::size_t>(N), 1);
  const unsigned n_masks = 1u << N;
  do {
    cand.perm = perm;
    for (unsigned mask = 0; mask < n_masks; ++mask) {
      for (Eigen::Index i = 0; i < N; ++i) {
        cand.sign[i] = (mask >> (N - 1 - i)) & 1u ? -1 : 1;
      }
      const double d = full_cost(apply_rows(B0, cand), bench.B0_hat, Winv);
      if (d < best.distance) {
        best = cand;
        best.distance = d;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

StructuralState apply_row_transform(const StructuralState& draw, const RowTransform& tr) {
  StructuralState out = draw;
  const Eigen::Index N = draw.B0.rows();
  out.B0 = apply_rows(draw.B0, tr);
  for (Eigen::Index i = 0; i < N; ++i) {
    const int j = tr.perm[i];
    out.sv[i] = draw.sv[j];
    if (draw.hyper.gamma_0.size() == N) {
      out.hyper.gamma_0(i) = draw.hyper.gamma_0(j);
    }
    if (draw.hyper.s_0.size() == N) {
      out.hyper.s_0(i) = draw.hyper.s_0(j);
    }
  }
  return out;
}

StructuralState normalize_draw(const StructuralState& draw, const NormalizationBenchmark& bench) {
  return apply_row_transform(draw, best_row_transform(draw.B0, bench));
}

PosteriorSample normalize_sample(const PosteriorSample& sample,
                                 const NormalizationBenchmark& bench) {
  PosteriorSample out;
  out.meta = sample.meta;
  out.draws.reserve(sample.draws.size());
  out.sddr_moments.reserve(sample.sddr_moments.size());
  for (std::size_t s = 0; s < sample.draws.size(); ++s) {
    const RowTransform tr = best_row_transform(sample.draws[s].B0, bench);
    out.draws.push_back(apply_row_transform(sample.draws[s], tr));
    if (s < sample.sddr_moments.size()) {
      const auto& m = sample.sddr_moments[s];
      std::vector<OmegaMoments> pm(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) {
        pm[i] = m[static_cast<std::size_t>(tr.perm[i])];
      }
      out.sddr_moments.push_back(std::move(pm));
    }
  }
  return out;
}

Interval hpd_interval(std::vector<double> draws, double level) {
  if (draws.empty()) {
    throw DomainError("hpd_interval: no draws");
  }
  if (!(level > 0.0 && level <= 1.0)) {
    throw DomainError("hpd_interval: level must lie in (0, 1]");
  }
  std::sort(draws.begin(), draws.end());
  const auto n = draws.size();
  auto m = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
  m = std::clamp<std::size_t>(m, 1, n);
  std::size_t best = 0;
  double width = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + m <= n; ++i) {
    const double w = draws[i + m - 1] - draws[i];
    if (w < width) {
      width = w;
      best = i;
    }
  }
  return {draws[best], draws[best + m - 1]};
}

VariancePaths conditional_variance_paths(const PosteriorSample& sample, double level) {
  if (sample.draws.empty()) {
    throw DomainError("conditional_variance_paths: empty sample");
  }
  const auto& first = sample.draws.front();
  const Eigen::Index N = first.B0.rows();
  const Eigen::Index T = first.sv.empty() ? 0 : first.sv.front().h.size();
  for (const auto& d : sample.draws) {
    for (const auto& e : d.sv) {
      if (e.h.size() != T) {
        throw DomainError("conditional_variance_paths: draws do not carry h paths of equal length");
      }
    }
  }
  VariancePaths out;
  out.mean = Eigen::MatrixXd::Ones(T + 1, N);
  out.lower = Eigen::MatrixXd::Ones(T + 1, N);
  out.upper = Eigen::MatrixXd::Ones(T + 1, N);
  std::vector<double> vals(sample.draws.size());
  for (Eigen::Index n = 0; n < N; ++n) {
    for (Eigen::Index t = 0; t < T; ++t) {
      double sum = 0.0;
      for (std::size_t s = 0; s < sample.draws.size(); ++s) {
        const auto& e = sample.draws[s].sv[n];
        vals[s] = std::exp(e.omega * e.h(t));
        sum += vals[s];
      }
      out.mean(t + 1, n) = sum / static_cast<double>(vals.size());
      const Interval iv = hpd_interval(vals, level);
      out.lower(t + 1, n) = iv.lower;
      out.upper(t + 1, n) = iv.upper;
    }
  }
  return out;
}

Eigen::MatrixXd posterior_mean_shocks(const PosteriorSample& sample, const SamplerContext& ctx) {
  if (sample.draws.empty()) {
    throw DomainError("posterior_mean_shocks: empty sample");
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ctx.T(), ctx.N());
  for (const auto& d : sample.draws) {
    acc += structural_shocks(d, ctx);
  }
  return acc / static_cast<double>(sample.draws.size());
}

std::vector<double> shock_instrument_correlation(const PosteriorSample& sample,
                                                 const SamplerContext& ctx,
                                                 const Eigen::VectorXd& instrument) {
  const Eigen::MatrixXd W = posterior_mean_shocks(sample, ctx);
  if (instrument.size() != W.rows()) {
    throw DomainError("instrument length " + std::to_string(instrument.size()) +
                      " differs from the estimation sample length " + std::to_string(W.rows()));
  }
  std::vector<Eigen::Index> idx;
  for (Eigen::Index t = 0; t < instrument.size(); ++t) {
    if (!std::isnan(instrument(t))) {
      idx.push_back(t);
    }
  }
  if (idx.size() < 3) {
    throw DomainError("instrument has fewer than 3 observed values");
  }
  const double m = static_cast<double>(idx.size());
  std::vector<double> out;
  for (Eigen::Index n = 0; n < W.cols(); ++n) {
    double mx = 0.0;
    double my = 0.0;
    for (auto t : idx) {
      mx += W(t, n);
      my += instrument(t);
    }
    mx /= m;
    my /= m;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (auto t : idx) {
      const double a = W(t, n) - mx;
      const double b = instrument(t) - my;
      sxy += a * b;
      sxx += a * a;
      syy += b * b;
    }
    out.push_back(sxy / std::sqrt(sxx * syy));
  }
  return out;
}

double log_posterior_kernel(const StructuralState& draw, const SamplerContext& ctx) {
  const Eigen::Index N = ctx.N();
  const Eigen::Index T = ctx.T();
  const double K = static_cast<double>(ctx.K());
  for (const auto& e : draw.sv) {
    if (e.h.size() != T) {
      throw DomainError("posterior kernel needs stored h paths (estimate with --store-h)");
    }
  }
  const Eigen::MatrixXd W = structural_shocks(draw, ctx);
  const double logdet = std::log(std::abs(draw.B0.determinant()));
  double lp = static_cast<double>(T) * logdet;
  const PriorConfig& pr = ctx.priors;
  const Eigen::VectorXd omega_inv = ctx.omega_bar.cwiseInverse();
  for (Eigen::Index n = 0; n < N; ++n) {
    const auto& e = draw.sv[n];
    const Eigen::ArrayXd logvar = e.omega * e.h.array();
    lp += -0.5 * logvar.sum() - 0.5 * (W.col(n).array().square() * (-logvar).exp()).sum();
    const double g0 = draw.hyper.gamma_0(n);
    lp += -0.5 * draw.B0.row(n).squaredNorm() / g0 - 0.5 * static_cast<double>(N) * std::log(g0);
    const double gA = draw.hyper.gamma_A(n);
    const Eigen::VectorXd dev = (draw.A.row(n) - ctx.A_prior_mean.row(n)).transpose();
    lp += -0.5 * dev.cwiseAbs2().dot(omega_inv) / gA - 0.5 * K * std::log(gA);
    double prev = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
      const double r = e.h(t) - e.rho * prev;
      lp -= 0.5 * r * r;
      prev = e.h(t);
    }
    lp += -0.5 * e.omega * e.omega / e.sigma2_omega - 0.5 * std::log(e.sigma2_omega);
    lp += (pr.A_omega - 1.0) * std::log(e.sigma2_omega) - e.sigma2_omega / pr.S_omega;
    lp -= std::log(2.0 * std::sqrt(1.0 - e.sigma2_omega));
  }
  return lp;
}

NormalizationBenchmark benchmark_from_mode(const PosteriorSample& sample,
                                           const SamplerContext& ctx) {
  if (sample.draws.empty()) {
    throw DomainError("benchmark_from_mode: empty sample");
  }
  std::size_t best = 0;
  double best_lp = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sample.draws.size(); ++s) {
    const double lp = log_posterior_kernel(sample.draws[s], ctx);
    if (lp > best_lp) {
      best_lp = lp;
      best = s;
    }
  }
  return {sample.draws[best].B0, Eigen::MatrixXd()};
}

Eigen::MatrixXd three_matrix_benchmark(const Eigen::VectorXd& sigma, const Eigen::MatrixXd& M1,
                                       const Eigen::MatrixXd& M2) {
  const Eigen::Index N = sigma.size();
  if (M1.rows() != N || M1.cols() != N || M2.rows() != N || M2.cols() != N) {
    throw DomainError("three_matrix_benchmark: dimension mismatch");
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(M1);
  if (!lu.isInvertible()) {
    throw DomainError("three_matrix_benchmark: middle matrix is singular");
  }
  return sigma.cwiseInverse().asDiagonal() * lu.inverse() * M2;
}

}  // namespace hsvar
