#include "hsvar/gibbs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hsvar/errors.hpp"
#include "hsvar/kernels.hpp"
#include "hsvar/special.hpp"

namespace hsvar {
namespace {

constexpr int kMixtureSize = static_cast<int>(kLogChi2Mixture.size());

struct MixtureTables {
  std::array<double, 10> mean, var, inv_var, half_prec, offset, log_prob;
};

const MixtureTables& mixture_tables() {
  static const MixtureTables t = [] {
    MixtureTables m{};
    for (int j = 0; j < kMixtureSize; ++j) {
      const auto& c = kLogChi2Mixture[j];
      m.mean[j] = c.mean;
      m.var[j] = c.var;
      m.inv_var[j] = 1.0 / c.var;
      m.half_prec[j] = 0.5 / c.var;
      m.log_prob[j] = std::log(c.prob);
      m.offset[j] = std::log(c.prob) - 0.5 * std::log(c.var);
    }
    return m;
  }();
  return t;
}

int prior_mode_component() {
  int best = 0;
  for (int j = 1; j < kMixtureSize; ++j) {
    if (kLogChi2Mixture[j].prob > kLogChi2Mixture[best].prob) {
      best = j;
    }
  }
  return best;
}

int draw_categorical(const double* logits, int K, Rng& rng) {
  double mx = logits[0];
  for (int j = 1; j < K; ++j) {
    mx = std::max(mx, logits[j]);
  }
  std::array<double, 10> cum{};
  double total = 0.0;
  for (int j = 0; j < K; ++j) {
    total += std::exp(logits[j] - mx);
    cum[j] = total;
  }
  const double u = rng.uniform() * total;
  for (int j = 0; j < K - 1; ++j) {
    if (u < cum[j]) {
      return j;
    }
  }
  return K - 1;
}

// H_rho applied to x with x_0 = 0.
double ar1_residual_ss(const Eigen::VectorXd& x, double rho) {
  double ss = 0.0;
  double prev = 0.0;
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    const double r = x(t) - rho * prev;
    ss += r * r;
    prev = x(t);
  }
  return ss;
}

Eigen::MatrixXd inverse_variances(const StructuralState& s, Eigen::Index T) {
  Eigen::MatrixXd iv(T, s.N());
  for (Eigen::Index n = 0; n < s.N(); ++n) {
    const auto& e = s.sv[n];
    if (e.h.size() != T) {
      throw DomainError("volatility path length differs from the sample length");
    }
    iv.col(n) = (-e.omega * e.h.array()).exp();
  }
  return iv;
}

Eigen::VectorXd mixture_inverse_variances(const std::vector<int>& s) {
  const auto& m = mixture_tables();
  Eigen::VectorXd v(static_cast<Eigen::Index>(s.size()));
  for (std::size_t t = 0; t < s.size(); ++t) {
    v(static_cast<Eigen::Index>(t)) = m.inv_var[s[t]];
  }
  return v;
}

Eigen::VectorXd centred_log_squares(const Eigen::VectorXd& w_tilde, const std::vector<int>& s) {
  const auto& m = mixture_tables();
  Eigen::VectorXd r(w_tilde.size());
  for (Eigen::Index t = 0; t < w_tilde.size(); ++t) {
    r(t) = w_tilde(t) - m.mean[s[t]];
  }
  return r;
}

Eigen::VectorXd draw_mvn_precision(const Eigen::MatrixXd& P, const Eigen::VectorXd& rhs,
                                   Rng& rng) {
  const Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("posterior precision is not positive definite");
  }
  const Eigen::VectorXd mean = llt.solve(rhs);
  Eigen::VectorXd z(P.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z(i) = rng.normal();
  }
  return mean + llt.matrixU().solve(z);
}

}  // namespace

Eigen::VectorXd log_squared(const Eigen::VectorXd& w, double offset) {
  return (w.array().square() + offset).log().matrix();
}

double gamma0_posterior_dof(const PriorConfig& priors, int N) {
  return priors.nu_0 + static_cast<double>(N);
}

SamplerContext make_context(const TimeSeriesData& data, const ModelConfig& cfg,
                            const PriorConfig& priors, const GibbsConfig& gcfg) {
  validate_data(data, cfg);
  const int N = static_cast<int>(data.N());
  const int d = static_cast<int>(data.d());
  ModelConfig c = cfg;
  if (c.stationary_flags.empty()) {
    c.stationary_flags.assign(N, false);
  }
  if (static_cast<int>(c.stationary_flags.size()) != N) {
    throw InputError("model.stationary has " + std::to_string(c.stationary_flags.size()) +
                     " entries for " + std::to_string(N) + " variables");
  }
  if (!(priors.S_omega > 0.0) || !(priors.A_omega > 0.0)) {
    throw InputError("priors.S_omega and priors.A_omega must be positive");
  }
  SamplerContext ctx;
  const Regressors r = build_regressors(data, c);
  ctx.Yt = r.Yt;
  ctx.X = r.X;
  ctx.A_prior_mean = prior_mean_A(c, d);
  ctx.omega_bar = omega_bar_diag(priors, N, c.p, d);
  ctx.priors = priors;
  ctx.p = c.p;
  ctx.prior_only = gcfg.prior_only;
  ctx.log_w2_offset = gcfg.log_w2_offset;
  ctx.truncate_sigma2_omega = gcfg.truncate_sigma2_omega;
  return ctx;
}

StructuralState initial_state(const SamplerContext& ctx) {
  const Eigen::Index N = ctx.N();
  const Eigen::Index K = ctx.K();
  const Eigen::Index T = ctx.T();
  const PriorConfig& pr = ctx.priors;
  StructuralState s;
  if (ctx.prior_only) {
    s.A = ctx.A_prior_mean;
    s.B0 = Eigen::MatrixXd::Identity(N, N);
  } else {
    const Eigen::MatrixXd XtX = ctx.X.transpose() * ctx.X;
    const double ridge = 1e-6 * std::max(1.0, XtX.diagonal().mean());
    const Eigen::MatrixXd reg = XtX + ridge * Eigen::MatrixXd::Identity(K, K);
    s.A = reg.llt().solve(ctx.X.transpose() * ctx.Yt).transpose();
    const Eigen::MatrixXd U = ctx.Yt - ctx.X * s.A.transpose();
    Eigen::MatrixXd Sigma = U.transpose() * U / static_cast<double>(T);
    Sigma.diagonal().array() += 1e-10 * std::max(1.0, Sigma.diagonal().maxCoeff());
    const Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
    if (llt.info() != Eigen::Success) {
      s.B0 = Eigen::MatrixXd::Identity(N, N);
    } else {
      s.B0 = llt.matrixL().solve(Eigen::MatrixXd::Identity(N, N));
    }
  }
  SvEquationState e;
  e.h = Eigen::VectorXd::Zero(T);
  e.omega = 0.1;
  e.rho = 0.5;
  e.sigma2_omega = 0.05;
  e.s.assign(static_cast<std::size_t>(T), prior_mode_component());
  s.sv.assign(static_cast<std::size_t>(N), e);

  Hyperparameters& h = s.hyper;
  h.s_gamma0 = pr.s_s0 / pr.nu_s0;
  h.s_0 = Eigen::VectorXd::Constant(N, h.s_gamma0 * pr.nu_gamma0);
  h.gamma_0 = h.s_0 / pr.nu_0;
  h.s_gammaA = pr.s_sA / pr.nu_sA;
  h.s_A = Eigen::VectorXd::Constant(N, h.s_gammaA * pr.nu_gammaA);
  h.gamma_A = h.s_A / pr.nu_A;
  return s;
}

Tridiagonal h_posterior_precision(double rho, double omega, const Eigen::VectorXd& inv_var) {
  const Eigen::Index T = inv_var.size();
  Tridiagonal P;
  P.diag = (omega * omega) * inv_var;
  P.diag.array() += 1.0 + rho * rho;
  if (T > 0) {
    P.diag(T - 1) -= rho * rho;
  }
  P.off = Eigen::VectorXd::Constant(std::max<Eigen::Index>(T - 1, 0), -rho);
  return P;
}

Eigen::MatrixXd tridiagonal_to_dense(const Tridiagonal& P) {
  const Eigen::Index T = P.diag.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(T, T);
  M.diagonal() = P.diag;
  for (Eigen::Index t = 0; t + 1 < T; ++t) {
    M(t, t + 1) = P.off(t);
    M(t + 1, t) = P.off(t);
  }
  return M;
}

Eigen::VectorXd sample_tridiagonal_gaussian(const Tridiagonal& P, const Eigen::VectorXd& b,
                                            Rng& rng) {
  const Eigen::Index T = P.diag.size();
  Eigen::VectorXd l(T);
  Eigen::VectorXd m(std::max<Eigen::Index>(T - 1, 0));
  for (Eigen::Index t = 0; t < T; ++t) {
    double d = P.diag(t);
    if (t > 0) {
      d -= m(t - 1) * m(t - 1);
    }
    if (!(d > 0.0)) {
      throw NumericalError("tridiagonal precision is not positive definite");
    }
    l(t) = std::sqrt(d);
    if (t + 1 < T) {
      m(t) = P.off(t) / l(t);
    }
  }
  // Mean: L y = b, then L' mu = y.
  Eigen::VectorXd y(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const double prev = t > 0 ? m(t - 1) * y(t - 1) : 0.0;
    y(t) = (b(t) - prev) / l(t);
  }
  Eigen::VectorXd z(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    z(t) = rng.normal();
  }
  // L' x = y + z gives mean plus a draw with covariance P^-1.
  Eigen::VectorXd x(T);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const double next = t + 1 < T ? m(t) * x(t + 1) : 0.0;
    x(t) = (y(t) + z(t) - next) / l(t);
  }
  return x;
}

Eigen::VectorXd sample_dense_gaussian(const Eigen::MatrixXd& P, const Eigen::VectorXd& b,
                                      Rng& rng) {
  const Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("dense precision is not positive definite");
  }
  const Eigen::VectorXd mean = llt.solve(b);
  Eigen::VectorXd z(P.rows());
  for (Eigen::Index t = 0; t < z.size(); ++t) {
    z(t) = rng.normal();
  }
  return mean + llt.matrixU().solve(z);
}

Eigen::MatrixXd conditional_variances(const StructuralState& s, Eigen::Index T) {
  return inverse_variances(s, T).cwiseInverse();
}

Eigen::MatrixXd structural_shocks(const StructuralState& s, const SamplerContext& ctx) {
  return (ctx.Yt - ctx.X * s.A.transpose()) * s.B0.transpose();
}

void sample_B0(StructuralState& s, const SamplerContext& ctx, Rng& rng) {
  const Eigen::Index N = ctx.N();
  const Eigen::Index T = ctx.T();
  const double Nd = static_cast<double>(N);
  Eigen::MatrixXd U;
  Eigen::MatrixXd iv;
  double nu_bar = Nd;
  if (!ctx.prior_only) {
    U = ctx.Yt - ctx.X * s.A.transpose();
    iv = inverse_variances(s, T);
    nu_bar += static_cast<double>(T);
  }
  Eigen::MatrixXd gram(N, N);
  for (Eigen::Index n = 0; n < N; ++n) {
    Eigen::MatrixXd S_inv = Eigen::MatrixXd::Identity(N, N) / s.hyper.gamma_0(n);
    if (!ctx.prior_only) {
      kernels::weighted_gram(U.data(), static_cast<std::size_t>(T), static_cast<std::size_t>(N),
                             iv.col(n).data(), gram.data());
      S_inv += gram;
    }
    Eigen::MatrixXd others(N - 1, N);
    for (Eigen::Index i = 0, r = 0; i < N; ++i) {
      if (i != n) {
        others.row(r++) = s.B0.row(i);
      }
    }
    s.B0.row(n) = special::sample_generalized_normal_row(S_inv, nu_bar, others, rng);
  }
}

void sample_A_row(int n, StructuralState& s, const SamplerContext& ctx, Rng& rng) {
  const Eigen::Index N = ctx.N();
  const Eigen::Index K = ctx.K();
  const Eigen::Index T = ctx.T();
  const double gamma = s.hyper.gamma_A(n);
  const Eigen::VectorXd omega_inv = ctx.omega_bar.cwiseInverse();

  Eigen::MatrixXd P = (omega_inv / gamma).asDiagonal();
  Eigen::VectorXd rhs =
      omega_inv.cwiseProduct(ctx.A_prior_mean.row(n).transpose()) / gamma;
  if (!ctx.prior_only) {
    const Eigen::MatrixXd iv = inverse_variances(s, T);
    Eigen::MatrixXd A0 = s.A;
    A0.row(n).setZero();
    const Eigen::MatrixXd Z = (ctx.Yt - ctx.X * A0.transpose()) * s.B0.transpose();
    const Eigen::VectorXd b = s.B0.col(n);
    const Eigen::VectorXd c = iv * b.cwiseAbs2();
    const Eigen::VectorXd r = (Z.cwiseProduct(iv)) * b;
    Eigen::MatrixXd gram(K, K);
    kernels::weighted_gram(ctx.X.data(), static_cast<std::size_t>(T),
                           static_cast<std::size_t>(K), c.data(), gram.data());
    P += gram;
    rhs += ctx.X.transpose() * r;
  }
  (void)N;
  s.A.row(n) = draw_mvn_precision(P, rhs, rng).transpose();
}

void sample_hyper_B0(StructuralState& s, const SamplerContext& ctx, Rng& rng) {
  const PriorConfig& pr = ctx.priors;
  const Eigen::Index N = ctx.N();
  Hyperparameters& h = s.hyper;
  const double dof = gamma0_posterior_dof(pr, static_cast<int>(N));
  for (Eigen::Index n = 0; n < N; ++n) {
    h.gamma_0(n) = special::sample_ig2(h.s_0(n) + s.B0.row(n).squaredNorm(), dof, rng);
  }
  for (Eigen::Index n = 0; n < N; ++n) {
    const double scale = 1.0 / (1.0 / h.s_gamma0 + 1.0 / (2.0 * h.gamma_0(n)));
    h.s_0(n) = special::sample_gamma(pr.nu_gamma0 + 0.5 * pr.nu_0, scale, rng);
  }
  h.s_gamma0 = special::sample_ig2(pr.s_s0 + 2.0 * h.s_0.sum(),
                                   pr.nu_s0 + 2.0 * static_cast<double>(N) * pr.nu_gamma0, rng);
}

void sample_hyper_A(StructuralState& s, const SamplerContext& ctx, Rng& rng) {
  const PriorConfig& pr = ctx.priors;
  const Eigen::Index N = ctx.N();
  const double K = static_cast<double>(ctx.K());
  Hyperparameters& h = s.hyper;
  const Eigen::VectorXd omega_inv = ctx.omega_bar.cwiseInverse();
  for (Eigen::Index n = 0; n < N; ++n) {
    const Eigen::VectorXd dev = (s.A.row(n) - ctx.A_prior_mean.row(n)).transpose();
    const double quad = dev.cwiseAbs2().dot(omega_inv);
    h.gamma_A(n) = special::sample_ig2(h.s_A(n) + quad, pr.nu_A + K, rng);
  }
  for (Eigen::Index n = 0; n < N; ++n) {
    const double scale = 1.0 / (1.0 / h.s_gammaA + 1.0 / (2.0 * h.gamma_A(n)));
    h.s_A(n) = special::sample_gamma(pr.nu_gammaA + 0.5 * pr.nu_A, scale, rng);
  }
  h.s_gammaA = special::sample_ig2(pr.s_sA + 2.0 * h.s_A.sum(),
                                   pr.nu_sA + 2.0 * static_cast<double>(N) * pr.nu_gammaA, rng);
}

void sample_mixture_indicators(SvEquationState& e, const Eigen::VectorXd& w_tilde, bool use_data,
                               Rng& rng) {
  const auto& m = mixture_tables();
  const Eigen::Index T = e.h.size();
  e.s.resize(static_cast<std::size_t>(T));
  if (!use_data) {
    for (Eigen::Index t = 0; t < T; ++t) {
      e.s[t] = draw_categorical(m.log_prob.data(), kMixtureSize, rng);
    }
    return;
  }
  const Eigen::VectorXd resid = w_tilde - e.omega * e.h;
  std::vector<double> logits(static_cast<std::size_t>(T) * kMixtureSize);
  kernels::mixture_logits(resid.data(), static_cast<std::size_t>(T), m.mean.data(),
                          m.half_prec.data(), m.offset.data(), kMixtureSize, logits.data());
  for (Eigen::Index t = 0; t < T; ++t) {
    e.s[t] = draw_categorical(logits.data() + t * kMixtureSize, kMixtureSize, rng);
  }
}

void sample_h(SvEquationState& e, const Eigen::VectorXd& w_tilde, bool use_data, Rng& rng) {
  const Eigen::Index T = e.h.size();
  if (!use_data) {
    const Tridiagonal P = h_posterior_precision(e.rho, 0.0, Eigen::VectorXd::Zero(T));
    e.h = sample_tridiagonal_gaussian(P, Eigen::VectorXd::Zero(T), rng);
    return;
  }
  if (!w_tilde.allFinite()) {
    throw DomainError("log squared shocks contain non-finite values");
  }
  const Eigen::VectorXd iv = mixture_inverse_variances(e.s);
  const Tridiagonal P = h_posterior_precision(e.rho, e.omega, iv);
  const Eigen::VectorXd b = e.omega * iv.cwiseProduct(centred_log_squares(w_tilde, e.s));
  e.h = sample_tridiagonal_gaussian(P, b, rng);
}

OmegaMoments sample_omega(SvEquationState& e, const Eigen::VectorXd& w_tilde, bool use_data,
                          Rng& rng) {
  double precision = 1.0 / e.sigma2_omega;
  double location = 0.0;
  if (use_data) {
    const Eigen::VectorXd iv = mixture_inverse_variances(e.s);
    const Eigen::VectorXd r = centred_log_squares(w_tilde, e.s);
    const auto T = static_cast<std::size_t>(e.h.size());
    precision += kernels::weighted_dot(e.h.data(), e.h.data(), iv.data(), T);
    location = kernels::weighted_dot(e.h.data(), r.data(), iv.data(), T);
  }
  const double var = 1.0 / precision;
  const double mean = var * location;
  e.omega = mean + std::sqrt(var) * rng.normal();
  return {mean, var};
}

void asis_interweave(SvEquationState& e, Rng& rng) {
  if (e.omega == 0.0) {
    return;
  }
  const Eigen::VectorXd h_tilde = e.omega * e.h;
  const double chi = ar1_residual_ss(h_tilde, e.rho);
  if (!(chi > 0.0)) {
    return;
  }
  const double T = static_cast<double>(e.h.size());
  const double sigma2_upsilon = special::sample_gig(-0.5 * (T - 1.0), chi, 1.0 / e.sigma2_omega, rng);
  const double magnitude = std::sqrt(sigma2_upsilon);
  e.omega = e.omega > 0.0 ? magnitude : -magnitude;
  e.h = h_tilde / e.omega;
}

void sample_rho(SvEquationState& e, Rng& rng) {
  const double bound = std::sqrt(1.0 - e.sigma2_omega);
  const Eigen::Index T = e.h.size();
  double sxx = 0.0;
  double sxy = 0.0;
  for (Eigen::Index t = 1; t < T; ++t) {
    sxx += e.h(t - 1) * e.h(t - 1);
    sxy += e.h(t) * e.h(t - 1);
  }
  if (!(sxx > 0.0)) {
    e.rho = -bound + 2.0 * bound * rng.uniform();
    return;
  }
  e.rho = special::sample_truncnorm(sxy / sxx, 1.0 / sxx, -bound, bound, rng);
}

void sample_sigma2_omega(SvEquationState& e, const PriorConfig& priors, bool truncate, Rng& rng) {
  const double upper = truncate ? 1.0 - e.rho * e.rho : 1.0;
  const double lambda = priors.A_omega - 0.5;
  const double chi = e.omega * e.omega;
  const double psi = 2.0 / priors.S_omega;
  constexpr int kMaxAttempts = 1000000;
  for (int i = 0; i < kMaxAttempts; ++i) {
    const double x = special::sample_gig(lambda, chi, psi, rng);
    if (x < upper) {
      e.sigma2_omega = x;
      return;
    }
  }
  throw NumericalError("sigma2_omega: no draw below " + std::to_string(upper) + " after " +
                       std::to_string(kMaxAttempts) + " attempts");
}

OmegaMoments sv_sweep(SvEquationState& e, const Eigen::VectorXd& w_tilde,
                      const PriorConfig& priors, const SvSweepOptions& opt, Rng& rng) {
  sample_mixture_indicators(e, w_tilde, opt.use_data, rng);
  sample_h(e, w_tilde, opt.use_data, rng);
  const OmegaMoments mom = sample_omega(e, w_tilde, opt.use_data, rng);
  asis_interweave(e, rng);
  if (opt.fixed_rho) {
    e.rho = *opt.fixed_rho;
  } else {
    sample_rho(e, rng);
  }
  sample_sigma2_omega(e, priors, opt.truncate_sigma2_omega, rng);
  return mom;
}

PosteriorSample run_chain(const TimeSeriesData& data, const ModelConfig& cfg,
                          const PriorConfig& priors, const GibbsConfig& gcfg) {
  if (gcfg.n_keep < 1 || gcfg.thin < 1 || gcfg.n_burn < 0) {
    throw InputError("gibbs: n_keep and thin must be positive and n_burn nonnegative");
  }
  const SamplerContext ctx = make_context(data, cfg, priors, gcfg);
  StructuralState state = initial_state(ctx);
  if (gcfg.fixed_rho) {
    for (auto& e : state.sv) {
      e.rho = *gcfg.fixed_rho;
    }
  }
  Rng rng(gcfg.seed);
  const Eigen::Index N = ctx.N();
  SvSweepOptions opt;
  opt.use_data = !ctx.prior_only;
  opt.truncate_sigma2_omega = ctx.truncate_sigma2_omega;
  opt.fixed_rho = gcfg.fixed_rho;

  PosteriorSample out;
  out.meta = {gcfg.seed, gcfg.chain, gcfg.n_burn, gcfg.thin};
  out.draws.reserve(static_cast<std::size_t>(gcfg.n_keep));
  out.sddr_moments.reserve(static_cast<std::size_t>(gcfg.n_keep));

  std::vector<OmegaMoments> moments(static_cast<std::size_t>(N));
  const long total = static_cast<long>(gcfg.n_burn) + static_cast<long>(gcfg.n_keep) * gcfg.thin;
  for (long it = 0; it < total; ++it) {
    try {
      sample_B0(state, ctx, rng);
      for (Eigen::Index n = 0; n < N; ++n) {
        sample_A_row(static_cast<int>(n), state, ctx, rng);
      }
      sample_hyper_B0(state, ctx, rng);
      sample_hyper_A(state, ctx, rng);
      Eigen::MatrixXd W;
      if (!ctx.prior_only) {
        W = structural_shocks(state, ctx);
      }
      for (Eigen::Index n = 0; n < N; ++n) {
        const Eigen::VectorXd w_tilde =
            ctx.prior_only ? Eigen::VectorXd() : log_squared(W.col(n), ctx.log_w2_offset);
        moments[n] = sv_sweep(state.sv[n], w_tilde, ctx.priors, opt, rng);
      }
    } catch (const std::exception& ex) {
      throw NumericalError("iteration " + std::to_string(it) + ": " + ex.what());
    }
    const long kept = it - gcfg.n_burn;
    if (kept >= 0 && (kept + 1) % gcfg.thin == 0) {
      StructuralState copy = state;
      for (auto& e : copy.sv) {
        e.s.clear();
        if (!gcfg.store_h) {
          e.h.resize(0);
        }
      }
      out.draws.push_back(std::move(copy));
      out.sddr_moments.push_back(moments);
    }
  }
  return out;
}

}  // namespace hsvar
