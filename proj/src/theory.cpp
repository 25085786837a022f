#include "hsvar/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hsvar/errors.hpp"

namespace hsvar::theory {
namespace {

constexpr int kMaxAttempts = 50;
constexpr double kGoodGap = 1e-3;
constexpr double kMinGap = 1e-10;
constexpr double kFitTol = 1e-6;

struct Whitened {
  Eigen::MatrixXd L;
  std::vector<Eigen::MatrixXd> W;  ///< L^{-1} Sigma_t L^{-T}, W[0] = I
};

Whitened whiten(const std::vector<Eigen::MatrixXd>& sigmas) {
  if (sigmas.empty()) {
    throw DomainError("identification: empty covariance sequence");
  }
  const Eigen::Index N = sigmas.front().rows();
  Whitened w;
  for (std::size_t t = 0; t < sigmas.size(); ++t) {
    if (sigmas[t].rows() != N || sigmas[t].cols() != N) {
      throw DomainError("identification: Sigma_" + std::to_string(t) + " is not " +
                        std::to_string(N) + "x" + std::to_string(N));
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (sigmas[0] + sigmas[0].transpose()));
  if (llt.info() != Eigen::Success) {
    throw DomainError("identification: Sigma_0 is not positive definite");
  }
  w.L = llt.matrixL();
  for (const auto& S : sigmas) {
    Eigen::MatrixXd X = llt.matrixL().solve(S);
    X = llt.matrixL().solve(X.transpose()).transpose();
    w.W.push_back(0.5 * (X + X.transpose()));
  }
  return w;
}

Eigen::VectorXd random_weights(std::size_t periods, Rng& rng) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(periods));
  if (periods == 1) {
    c(0) = 1.0;
    return c;
  }
  for (std::size_t t = 1; t < periods; ++t) {
    c(static_cast<Eigen::Index>(t)) = rng.exponential();
  }
  return c / c.sum();
}

Eigen::MatrixXd combine(const Whitened& w, const Eigen::VectorXd& c) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(w.L.rows(), w.L.rows());
  for (Eigen::Index t = 0; t < c.size(); ++t) {
    M += c(t) * w.W[static_cast<std::size_t>(t)];
  }
  return M;
}

double spectral_scale(const Eigen::VectorXd& ev) {
  return std::max(1.0, ev.cwiseAbs().maxCoeff());
}

void normalize_sign(Eigen::VectorXd& v) {
  const double tol = 1e-12 * v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > tol) {
      if (v(i) < 0.0) {
        v = -v;
      }
      return;
    }
  }
}

Eigen::VectorXd fitted_pattern(const Whitened& w, const Eigen::VectorXd& q) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(w.W.size()));
  for (std::size_t t = 0; t < w.W.size(); ++t) {
    p(static_cast<Eigen::Index>(t)) = q.dot(w.W[t] * q);
  }
  return p;
}

bool patterns_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  for (Eigen::Index t = 0; t < a.size(); ++t) {
    if (std::abs(a(t) - b(t)) > tol * std::max(1.0, std::abs(a(t)))) {
      return false;
    }
  }
  return true;
}

/// Group index per equation; equations with equal patterns share a group.
std::vector<int> pattern_groups(const VarianceSequence& seq, double tol) {
  const Eigen::Index N = seq.N();
  std::vector<int> g(static_cast<std::size_t>(N), -1);
  int next = 0;
  for (Eigen::Index i = 0; i < N; ++i) {
    if (g[i] >= 0) {
      continue;
    }
    g[i] = next;
    for (Eigen::Index j = i + 1; j < N; ++j) {
      if (g[j] < 0 && !check_condition_pair(seq, i, j, tol)) {
        g[j] = next;
      }
    }
    ++next;
  }
  return g;
}

void check_sizes(const std::vector<Eigen::MatrixXd>& sigmas, const VarianceSequence& seq) {
  validate(seq);
  if (sigmas.size() != seq.periods()) {
    throw DomainError("identification: " + std::to_string(sigmas.size()) +
                      " covariance matrices for " + std::to_string(seq.periods()) +
                      " variance periods");
  }
  if (!sigmas.empty() && sigmas.front().rows() != seq.N()) {
    throw DomainError("identification: covariance dimension differs from the number of equations");
  }
}

}  // namespace

bool check_condition_pair(const VarianceSequence& seq, Eigen::Index i, Eigen::Index j,
                          double tol) {
  for (const auto& l : seq.lambdas) {
    if (std::abs(l(i) - l(j)) > tol) {
      return true;
    }
  }
  return false;
}

Eigen::VectorXd VarianceSequence::pattern(Eigen::Index n) const {
  Eigen::VectorXd p(static_cast<Eigen::Index>(lambdas.size()));
  for (std::size_t t = 0; t < lambdas.size(); ++t) {
    p(static_cast<Eigen::Index>(t)) = lambdas[t](n);
  }
  return p;
}

VarianceSequence VarianceSequence::from_equations(const std::vector<Eigen::VectorXd>& per_equation) {
  VarianceSequence seq;
  if (per_equation.empty()) {
    return seq;
  }
  const Eigen::Index K = per_equation.front().size();
  const auto N = static_cast<Eigen::Index>(per_equation.size());
  for (Eigen::Index t = 0; t < K; ++t) {
    Eigen::VectorXd l(N);
    for (Eigen::Index n = 0; n < N; ++n) {
      if (per_equation[n].size() != K) {
        throw DomainError("variance sequence: equations have patterns of different lengths");
      }
      l(n) = per_equation[n](t);
    }
    seq.lambdas.push_back(std::move(l));
  }
  return seq;
}

void validate(const VarianceSequence& seq) {
  if (seq.lambdas.empty() || seq.N() == 0) {
    throw DomainError("variance sequence: empty");
  }
  for (std::size_t t = 0; t < seq.lambdas.size(); ++t) {
    const auto& l = seq.lambdas[t];
    if (l.size() != seq.N()) {
      throw DomainError("variance sequence: period " + std::to_string(t) + " has wrong length");
    }
    for (Eigen::Index n = 0; n < l.size(); ++n) {
      if (!(l(n) > 0.0) || !std::isfinite(l(n))) {
        throw DomainError("variance sequence: entry (" + std::to_string(t) + ", " +
                          std::to_string(n) + ") is not positive");
      }
      if (t == 0 && std::abs(l(n) - 1.0) > 1e-12) {
        throw DomainError("variance sequence: period 0 must be all ones");
      }
    }
  }
}

bool check_condition(const VarianceSequence& seq, Eigen::Index n, double tol) {
  validate(seq);
  if (n < 0 || n >= seq.N()) {
    throw DomainError("check_condition: equation index out of range");
  }
  for (Eigen::Index m = 0; m < seq.N(); ++m) {
    if (m != n && !check_condition_pair(seq, n, m, tol)) {
      return false;
    }
  }
  return true;
}

std::vector<Eigen::MatrixXd> covariance_sequence(const Eigen::MatrixXd& B,
                                                 const VarianceSequence& seq) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(seq.periods());
  for (const auto& l : seq.lambdas) {
    out.push_back(B * l.asDiagonal() * B.transpose());
  }
  return out;
}

Eigen::VectorXd recover_column(const std::vector<Eigen::MatrixXd>& sigmas,
                               const VarianceSequence& seq, Eigen::Index n, Rng& rng) {
  check_sizes(sigmas, seq);
  if (!check_condition(seq, n)) {
    throw IdentificationAmbiguous("column " + std::to_string(n + 1) +
                                  " shares its variance pattern with another column");
  }
  const Whitened w = whiten(sigmas);
  const Eigen::VectorXd pat = seq.pattern(n);

  double best_gap = -1.0;
  Eigen::VectorXd best_q;
  for (int attempt = 0; attempt < kMaxAttempts && best_gap < kGoodGap; ++attempt) {
    const Eigen::VectorXd c = random_weights(seq.periods(), rng);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(combine(w, c));
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double target = c.dot(pat);
    Eigen::Index idx = 0;
    (ev.array() - target).abs().minCoeff(&idx);
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (i != idx) {
        gap = std::min(gap, std::abs(ev(i) - ev(idx)));
      }
    }
    gap /= spectral_scale(ev);
    if (gap > best_gap) {
      best_gap = gap;
      best_q = es.eigenvectors().col(idx);
    }
  }
  if (best_gap < kMinGap) {
    throw NumericalError("recover_column: no combination separated the spectrum");
  }
  const Eigen::VectorXd fit = fitted_pattern(w, best_q);
  if (!patterns_equal(pat, fit, kFitTol)) {
    throw DomainError("recover_column: covariance sequence does not fit the variance pattern of "
                      "column " + std::to_string(n + 1));
  }
  Eigen::VectorXd v = w.L * best_q;
  normalize_sign(v);
  return v;
}

Eigen::VectorXd recover_row(const std::vector<Eigen::MatrixXd>& sigmas,
                            const VarianceSequence& seq, Eigen::Index n, Rng& rng) {
  std::vector<Eigen::MatrixXd> inv;
  inv.reserve(sigmas.size());
  for (const auto& S : sigmas) {
    inv.push_back(S.llt().solve(Eigen::MatrixXd::Identity(S.rows(), S.cols())));
  }
  VarianceSequence rec = seq;
  for (auto& l : rec.lambdas) {
    l = l.cwiseInverse();
  }
  return recover_column(inv, rec, n, rng);
}

RecoveredStructure recover_structure(const std::vector<Eigen::MatrixXd>& sigmas, Rng& rng,
                                     double pattern_tol) {
  const Whitened w = whiten(sigmas);
  const Eigen::Index N = w.L.rows();
  const double total = [&] {
    double s = 0.0;
    for (const auto& W : w.W) s += W.norm();
    return s;
  }();
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Eigen::VectorXd c = random_weights(sigmas.size(), rng);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(combine(w, c));
    const Eigen::MatrixXd& Q = es.eigenvectors();
    RecoveredStructure out;
    out.B = w.L * Q;
    double misfit = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      out.patterns.push_back(fitted_pattern(w, Q.col(i)));
    }
    for (std::size_t t = 0; t < w.W.size(); ++t) {
      Eigen::VectorXd d(N);
      for (Eigen::Index i = 0; i < N; ++i) {
        d(i) = out.patterns[i](static_cast<Eigen::Index>(t));
      }
      misfit += (w.W[t] - Q * d.asDiagonal() * Q.transpose()).norm();
    }
    if (misfit > 1e-8 * total) {
      continue;
    }
    for (Eigen::Index i = 0; i < N; ++i) {
      bool unique = true;
      for (Eigen::Index j = 0; j < N; ++j) {
        if (j != i && patterns_equal(out.patterns[i], out.patterns[j], pattern_tol)) {
          unique = false;
        }
      }
      out.identified.push_back(unique);
      Eigen::VectorXd col = out.B.col(i);
      normalize_sign(col);
      out.B.col(i) = col;
    }
    return out;
  }
  throw DomainError("recover_structure: the covariance sequence is not simultaneously "
                    "diagonalizable");
}

RecoveredStructure recover_structure(const std::vector<Eigen::MatrixXd>& sigmas,
                                     const VarianceSequence& seq, Rng& rng) {
  check_sizes(sigmas, seq);
  const Whitened w = whiten(sigmas);
  const Eigen::Index N = seq.N();
  const std::vector<int> group = pattern_groups(seq, 1e-12);

  double best_gap = -1.0;
  RecoveredStructure best;
  for (int attempt = 0; attempt < kMaxAttempts && best_gap < kGoodGap; ++attempt) {
    const Eigen::VectorXd c = random_weights(seq.periods(), rng);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(combine(w, c));
    const Eigen::VectorXd& ev = es.eigenvalues();
    std::vector<bool> used(static_cast<std::size_t>(N), false);
    std::vector<Eigen::Index> assign(static_cast<std::size_t>(N));
    for (Eigen::Index n = 0; n < N; ++n) {
      const double target = c.dot(seq.pattern(n));
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < N; ++i) {
        if (!used[i] && std::abs(ev(i) - target) < best_d) {
          best_d = std::abs(ev(i) - target);
          assign[n] = i;
        }
      }
      used[assign[n]] = true;
    }
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < N; ++a) {
      for (Eigen::Index b = 0; b < N; ++b) {
        if (group[a] != group[b]) {
          gap = std::min(gap, std::abs(ev(assign[a]) - ev(assign[b])));
        }
      }
    }
    gap /= spectral_scale(ev);
    if (gap > best_gap) {
      best_gap = gap;
      best = RecoveredStructure{};
      best.B.resize(N, N);
      for (Eigen::Index n = 0; n < N; ++n) {
        const Eigen::VectorXd q = es.eigenvectors().col(assign[n]);
        Eigen::VectorXd col = w.L * q;
        normalize_sign(col);
        best.B.col(n) = col;
        best.patterns.push_back(fitted_pattern(w, q));
      }
    }
  }
  if (best_gap < kMinGap) {
    throw NumericalError("recover_structure: no combination separated the spectrum");
  }
  for (Eigen::Index n = 0; n < N; ++n) {
    if (!patterns_equal(seq.pattern(n), best.patterns[n], kFitTol)) {
      throw DomainError("recover_structure: covariance sequence does not fit the variance "
                        "pattern of column " + std::to_string(n + 1));
    }
    best.identified.push_back(check_condition(seq, n));
  }
  return best;
}

Eigen::MatrixXd haar_orthogonal(Eigen::Index k, Rng& rng) {
  Eigen::MatrixXd G(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) {
      G(i, j) = rng.normal();
    }
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (R(j, j) < 0.0) {
      Q.col(j) = -Q.col(j);
    }
  }
  return Q;
}

Eigen::MatrixXd random_admissible_rotation(const VarianceSequence& seq, Rng& rng) {
  const Eigen::Index N = seq.N();
  const std::vector<int> group = pattern_groups(seq, 1e-12);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(N, N);
  const int n_groups = *std::max_element(group.begin(), group.end()) + 1;
  for (int g = 0; g < n_groups; ++g) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < N; ++i) {
      if (group[i] == g) {
        idx.push_back(i);
      }
    }
    if (idx.size() < 2) {
      continue;
    }
    const Eigen::MatrixXd H = haar_orthogonal(static_cast<Eigen::Index>(idx.size()), rng);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = 0; b < idx.size(); ++b) {
        Q(idx[a], idx[b]) = H(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
    }
  }
  return Q;
}

ProbeResult rotation_ambiguity_probe(const std::vector<Eigen::MatrixXd>& sigmas,
                                     const VarianceSequence& seq, Eigen::Index n, Rng& rng,
                                     int n_rotations) {
  if (n < 0 || n >= seq.N()) {
    throw DomainError("rotation_ambiguity_probe: column index out of range");
  }
  const RecoveredStructure rec = recover_structure(sigmas, seq, rng);
  const Eigen::Index N = seq.N();
  ProbeResult out;
  out.per_column.assign(static_cast<std::size_t>(N), 0.0);
  for (int r = 0; r < n_rotations; ++r) {
    const Eigen::MatrixXd Bs = rec.B * random_admissible_rotation(seq, rng);
    for (std::size_t t = 0; t < sigmas.size(); ++t) {
      const Eigen::MatrixXd fit = Bs * seq.lambdas[t].asDiagonal() * Bs.transpose();
      out.max_fit_error = std::max(out.max_fit_error, (fit - sigmas[t]).norm() / sigmas[t].norm());
    }
    for (Eigen::Index j = 0; j < N; ++j) {
      const double d = std::min((Bs.col(j) - rec.B.col(j)).norm(), (Bs.col(j) + rec.B.col(j)).norm());
      out.per_column[j] = std::max(out.per_column[j], d);
    }
  }
  out.column_deviation = out.per_column[n];
  return out;
}

double irf_rotation_deviation(const std::vector<Eigen::MatrixXd>& phi, const Eigen::MatrixXd& B,
                              const VarianceSequence& seq, Eigen::Index n, Rng& rng,
                              int n_rotations) {
  double dev = 0.0;
  for (int r = 0; r < n_rotations; ++r) {
    const Eigen::MatrixXd Bs = B * random_admissible_rotation(seq, rng);
    for (const auto& P : phi) {
      dev = std::max(dev, (P * Bs.col(n) - P * B.col(n)).cwiseAbs().maxCoeff());
    }
  }
  return dev;
}

}  // namespace hsvar::theory
