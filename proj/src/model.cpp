#include "hsvar/model.hpp"

#include <cmath>
#include <sstream>

#include "hsvar/errors.hpp"

namespace hsvar {

const std::array<MixtureComponent, 10> kLogChi2Mixture = {{
    {0.00609, 1.92677, 0.11265},
    {0.04775, 1.34744, 0.17788},
    {0.13057, 0.73504, 0.26768},
    {0.20674, 0.02266, 0.40611},
    {0.22715, -0.85173, 0.62699},
    {0.18842, -1.97278, 0.98583},
    {0.12047, -3.46788, 1.57469},
    {0.05591, -5.55246, 2.54498},
    {0.01575, -8.68384, 4.16591},
    {0.00115, -14.65000, 7.33342},
}};

Eigen::VectorXd minnesota_omega_diag(int N, int p, int d) {
  Eigen::VectorXd v(N * p + d);
  for (int lag = 1; lag <= p; ++lag) {
    v.segment((lag - 1) * N, N).setConstant(1.0 / lag);
  }
  v.tail(d).setConstant(100.0);
  return v;
}

Eigen::VectorXd omega_bar_diag(const PriorConfig& priors, int N, int p, int d) {
  if (priors.omega_bar.empty()) {
    return minnesota_omega_diag(N, p, d);
  }
  const int K = N * p + d;
  if (static_cast<int>(priors.omega_bar.size()) != K) {
    throw InputError("priors.omega_bar has " + std::to_string(priors.omega_bar.size()) +
                     " entries, expected " + std::to_string(K));
  }
  Eigen::VectorXd v(K);
  for (int i = 0; i < K; ++i) {
    if (!(priors.omega_bar[i] > 0.0)) {
      throw InputError("priors.omega_bar[" + std::to_string(i) + "] must be positive");
    }
    v(i) = priors.omega_bar[i];
  }
  return v;
}

void validate_data(const TimeSeriesData& data, const ModelConfig& cfg) {
  if (cfg.p < 1) {
    throw InputError("model.p must be at least 1");
  }
  if (data.D.rows() != data.Y.rows() && data.D.size() > 0) {
    throw InputError("deterministic terms have " + std::to_string(data.D.rows()) +
                     " rows but the data have " + std::to_string(data.Y.rows()));
  }
  const Eigen::Index K = data.N() * cfg.p + data.d();
  if (data.T() - cfg.p <= K) {
    throw InputError("insufficient observations: " + std::to_string(data.T()) +
                     " rows for p = " + std::to_string(cfg.p) + " and " + std::to_string(K) +
                     " regressors");
  }
  for (Eigen::Index t = 0; t < data.T(); ++t) {
    for (Eigen::Index j = 0; j < data.N(); ++j) {
      if (!std::isfinite(data.Y(t, j))) {
        throw InputError("non-finite observation at row " + std::to_string(t + 1) +
                         ", column " + std::to_string(j + 1));
      }
    }
    for (Eigen::Index j = 0; j < data.d(); ++j) {
      if (!std::isfinite(data.D(t, j))) {
        throw InputError("non-finite deterministic term at row " + std::to_string(t + 1) +
                         ", column " + std::to_string(j + 1));
      }
    }
  }
}

Regressors build_regressors(const TimeSeriesData& data, const ModelConfig& cfg) {
  const Eigen::Index T = data.T();
  const Eigen::Index N = data.N();
  const Eigen::Index d = data.d();
  const int p = cfg.p;
  if (p < 1 || T <= p) {
    throw InputError("insufficient observations: " + std::to_string(T) +
                     " rows for lag order " + std::to_string(p));
  }
  const Eigen::Index Tp = T - p;
  Regressors r;
  r.Yt = data.Y.bottomRows(Tp);
  r.X.resize(Tp, N * p + d);
  for (int lag = 1; lag <= p; ++lag) {
    r.X.middleCols((lag - 1) * N, N) = data.Y.middleRows(p - lag, Tp);
  }
  if (d > 0) {
    r.X.rightCols(d) = data.D.bottomRows(Tp);
  }
  return r;
}

Eigen::MatrixXd prior_mean_A(const ModelConfig& cfg, int d) {
  const int N = static_cast<int>(cfg.stationary_flags.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N * cfg.p + d);
  for (int n = 0; n < N; ++n) {
    A(n, n) = cfg.stationary_flags[n] ? 0.0 : 1.0;
  }
  return A;
}

std::vector<Eigen::MatrixXd> lag_matrices(const Eigen::MatrixXd& A, int p) {
  const Eigen::Index N = A.rows();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(p);
  for (int lag = 0; lag < p; ++lag) {
    out.emplace_back(A.middleCols(lag * N, N));
  }
  return out;
}

std::vector<std::string> validate_state(const StructuralState& s) {
  std::vector<std::string> v;
  auto add = [&v](const std::string& field, const std::string& msg) {
    v.push_back(field + ": " + msg);
  };
  const Eigen::Index N = s.B0.rows();
  if (s.B0.cols() != N || N == 0) {
    add("B0", "must be a nonempty square matrix");
    return v;
  }
  if (!s.B0.allFinite()) {
    add("B0", "contains non-finite entries");
  } else {
    const double det = s.B0.determinant();
    const double scale = std::pow(std::max(1e-300, s.B0.cwiseAbs().maxCoeff()), N);
    if (!(std::abs(det) > 1e-12 * scale)) {
      std::ostringstream os;
      os << "singular (|det| = " << std::abs(det) << ")";
      add("B0", os.str());
    }
  }
  if (s.A.rows() != N) {
    add("A", "row count differs from B0");
  } else if (!s.A.allFinite()) {
    add("A", "contains non-finite entries");
  }
  if (static_cast<Eigen::Index>(s.sv.size()) != N) {
    add("sv", "one volatility state per equation is required");
  }
  for (std::size_t n = 0; n < s.sv.size(); ++n) {
    const auto& e = s.sv[n];
    const std::string pre = "sv[" + std::to_string(n) + "].";
    if (!(e.sigma2_omega > 0.0 && e.sigma2_omega < 1.0)) {
      add(pre + "sigma2_omega", "outside (0, 1): " + std::to_string(e.sigma2_omega));
    } else if (!(std::abs(e.rho) < std::sqrt(1.0 - e.sigma2_omega))) {
      add(pre + "rho", "|rho| = " + std::to_string(std::abs(e.rho)) +
                           " violates |rho| < sqrt(1 - sigma2_omega) = " +
                           std::to_string(std::sqrt(1.0 - e.sigma2_omega)));
    }
    if (!std::isfinite(e.omega)) {
      add(pre + "omega", "not finite");
    }
    if (!e.h.allFinite()) {
      add(pre + "h", "contains non-finite entries");
    }
    for (int c : e.s) {
      if (c < 0 || c >= static_cast<int>(kLogChi2Mixture.size())) {
        add(pre + "s", "mixture indicator out of range");
        break;
      }
    }
  }
  const auto& h = s.hyper;
  auto positive = [&](const Eigen::VectorXd& x, const char* name) {
    if (x.size() != N) {
      add(std::string("hyper.") + name, "length differs from N");
    } else if (!(x.array() > 0.0).all() || !x.allFinite()) {
      add(std::string("hyper.") + name, "entries must be positive and finite");
    }
  };
  positive(h.gamma_0, "gamma_0");
  positive(h.s_0, "s_0");
  positive(h.gamma_A, "gamma_A");
  positive(h.s_A, "s_A");
  if (!(h.s_gamma0 > 0.0) || !std::isfinite(h.s_gamma0)) {
    add("hyper.s_gamma0", "must be positive");
  }
  if (!(h.s_gammaA > 0.0) || !std::isfinite(h.s_gammaA)) {
    add("hyper.s_gammaA", "must be positive");
  }
  return v;
}

}  // namespace hsvar
