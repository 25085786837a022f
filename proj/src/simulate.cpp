#include "hsvar/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <sstream>

#include "hsvar/errors.hpp"
#include "hsvar/special.hpp"

namespace hsvar::sim {

double companion_spectral_radius(const Eigen::MatrixXd& A, int p) {
  const Eigen::Index N = A.rows();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N * p, N * p);
  C.topRows(N) = A.leftCols(N * p);
  if (p > 1) {
    C.bottomLeftCorner(N * (p - 1), N * (p - 1)).setIdentity();
  }
  return Eigen::EigenSolver<Eigen::MatrixXd>(C, false).eigenvalues().cwiseAbs().maxCoeff();
}

void validate_spec(const DgpSpec& spec) {
  const Eigen::Index N = spec.B0.rows();
  const int d = spec.constant ? 1 : 0;
  if (N == 0 || spec.B0.cols() != N) {
    throw DomainError("dgp: B0 must be square and nonempty");
  }
  if (spec.p < 1 || spec.T < 1) {
    throw DomainError("dgp: p and T must be positive");
  }
  if (spec.A.rows() != N || spec.A.cols() != N * spec.p + d) {
    std::ostringstream os;
    os << "dgp: A must be " << N << "x" << N * spec.p + d << ", got " << spec.A.rows() << "x"
       << spec.A.cols();
    throw DomainError(os.str());
  }
  if (spec.omega.size() != N || spec.rho.size() != N) {
    throw DomainError("dgp: omega and rho need one entry per equation");
  }
  for (Eigen::Index n = 0; n < N; ++n) {
    if (!(std::abs(spec.rho(n)) < 1.0)) {
      throw DomainError("dgp: |rho| must be below 1 for equation " + std::to_string(n + 1));
    }
  }
  if (!Eigen::FullPivLU<Eigen::MatrixXd>(spec.B0).isInvertible()) {
    throw DomainError("dgp: B0 is singular");
  }
  const double radius = companion_spectral_radius(spec.A, spec.p);
  if (radius >= 1.0 && !spec.allow_unstable) {
    std::ostringstream os;
    os << "dgp: companion matrix has spectral radius " << radius
       << " >= 1; pass --allow-unstable to simulate anyway";
    throw DomainError(os.str());
  }
}

SimulationResult generate(const DgpSpec& spec) {
  validate_spec(spec);
  const Eigen::Index N = spec.B0.rows();
  const int p = spec.p;
  const int T = spec.T;
  Rng rng(spec.seed);
  const Eigen::MatrixXd B = spec.B0.inverse();

  SimulationResult r;
  r.h.resize(T, N);
  r.w.resize(T, N);
  r.sigma2.resize(T, N);
  for (Eigen::Index n = 0; n < N; ++n) {
    double h = 0.0;
    for (int t = 0; t < T; ++t) {
      h = spec.rho(n) * h + rng.normal();
      r.h(t, n) = h;
    }
  }
  for (int t = 0; t < T; ++t) {
    for (Eigen::Index n = 0; n < N; ++n) {
      r.sigma2(t, n) = std::exp(spec.omega(n) * r.h(t, n));
      r.w(t, n) = std::sqrt(r.sigma2(t, n)) * rng.normal();
    }
  }

  auto& data = r.data;
  data.Y = Eigen::MatrixXd::Zero(T + p, N);
  data.D = Eigen::MatrixXd::Ones(T + p, spec.constant ? 1 : 0);
  for (Eigen::Index n = 0; n < N; ++n) {
    data.names.push_back("y" + std::to_string(n + 1));
  }
  if (spec.constant) {
    data.deterministic_names.push_back("const");
  }
  const auto lags = lag_matrices(spec.A, p);
  for (int t = p; t < T + p; ++t) {
    Eigen::VectorXd y = B * r.w.row(t - p).transpose();
    for (int j = 1; j <= p; ++j) {
      y += lags[j - 1] * data.Y.row(t - j).transpose();
    }
    if (spec.constant) {
      y += spec.A.col(N * p);
    }
    data.Y.row(t) = y.transpose();
  }
  return r;
}

DgpSpec preset(const std::string& name) {
  DgpSpec s;
  s.B0 = (Eigen::MatrixXd(2, 2) << 1.0, 0.0, -0.5, 1.0).finished();
  s.A = (Eigen::MatrixXd(2, 3) << 0.5, 0.0, 0.1, 0.1, 0.4, -0.1).finished();
  s.rho = Eigen::Vector2d(0.8, 0.5);
  s.T = 300;
  s.p = 1;
  s.constant = true;
  s.seed = 1;
  if (name == "heteroskedastic") {
    s.omega = Eigen::Vector2d(0.8, 0.0);
  } else if (name == "homoskedastic") {
    s.omega = Eigen::Vector2d(0.0, 0.0);
  } else {
    throw DomainError("unknown preset '" + name + "' (expected heteroskedastic or homoskedastic)");
  }
  return s;
}

std::vector<std::string> preset_names() { return {"heteroskedastic", "homoskedastic"}; }

double kolmogorov_pvalue(double d, int n) {
  const double sn = std::sqrt(static_cast<double>(n));
  // Stephens' finite-sample correction of the limiting argument.
  const double x = (sn + 0.12 + 0.11 / sn) * d;
  if (x < 0.2) {
    return 1.0;
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) {
      break;
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

SigmaCheckResult empirical_sigma_check(const DgpSpec& spec, int n, int t,
                                       const SigmaCheckOptions& opts, Rng& rng) {
  if (t < 1) {
    throw DomainError("empirical_sigma_check: t must be at least 1");
  }
  if (n < 0 || n >= spec.rho.size()) {
    throw DomainError("empirical_sigma_check: equation index out of range");
  }
  const double rho = spec.rho(n);
  SigmaCheckResult out;
  out.n_rep = opts.n_rep;
  out.variance_factor = (1.0 - std::pow(rho, 2.0 * t)) / (1.0 - rho * rho);
  std::vector<double> draws(static_cast<std::size_t>(opts.n_rep));
  for (auto& x : draws) {
    const double omega =
        opts.random_omega ? std::sqrt(opts.sigma2_omega) * rng.normal() : spec.omega(n);
    double h = 0.0;
    for (int s = 0; s < t; ++s) {
      h = rho * h + rng.normal();
    }
    x = std::exp(omega * h);
  }
  if (opts.random_omega) {
    const special::NormalProductParams np{opts.sigma2_omega * out.variance_factor};
    out.ks_statistic = ks_statistic(std::move(draws), [&](double q) {
      return special::lognp_cdf(q, np);
    });
  } else {
    const double sd = std::abs(spec.omega(n)) * std::sqrt(out.variance_factor);
    if (sd == 0.0) {
      throw DomainError("empirical_sigma_check: omega = 0 gives a point mass at 1");
    }
    const boost::math::normal_distribution<double> law(0.0, sd);
    out.ks_statistic = ks_statistic(std::move(draws), [&](double q) {
      return boost::math::cdf(law, std::log(q));
    });
  }
  out.p_value = kolmogorov_pvalue(out.ks_statistic, opts.n_rep);
  return out;
}

}  // namespace hsvar::sim
