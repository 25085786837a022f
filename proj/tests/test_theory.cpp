#include <doctest.h>

#include <cmath>

#include "hsvar/errors.hpp"
#include "hsvar/structural.hpp"
#include "hsvar/theory.hpp"

using namespace hsvar;
using namespace hsvar::theory;

namespace {

VarianceSequence seq_of(std::initializer_list<std::initializer_list<double>> eqs) {
  std::vector<Eigen::VectorXd> v;
  for (const auto& e : eqs) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(e.size()));
    Eigen::Index i = 0;
    for (double d : e) x(i++) = d;
    v.push_back(x);
  }
  return VarianceSequence::from_equations(v);
}

double up_to_sign(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("identification condition") {
  const auto s = seq_of({{1, 2, 1}, {1, 1, 1}});
  CHECK(check_condition(s, 0));
  CHECK(check_condition(s, 1));
  CHECK_FALSE(check_condition(seq_of({{1, 2}, {1, 2}}), 0));
  // Proportional but unequal patterns differ once period 0 is standardized.
  CHECK(check_condition(seq_of({{1, 2, 4}, {1, 3, 9}}), 0));
  CHECK_THROWS_AS(validate(seq_of({{2, 1}, {1, 1}})), DomainError);
  CHECK_THROWS_AS(validate(seq_of({{1, -1}, {1, 1}})), DomainError);
}

TEST_CASE("hand-computable two-by-two recovery") {
  Eigen::Matrix2d B;
  B << 1, 1, 0, 1;
  const auto seq = seq_of({{1, 2}, {1, 1}});
  const auto sig = covariance_sequence(B, seq);
  Rng rng(1);
  const Eigen::VectorXd c = recover_column(sig, seq, 0, rng);
  CHECK(up_to_sign(c, Eigen::Vector2d(1, 0)) < 1e-8);
  CHECK(c(0) > 0.0);
  const Eigen::VectorXd c2 = recover_column(sig, seq, 1, rng);
  CHECK(up_to_sign(c2, B.col(1)) < 1e-8);
}

TEST_CASE("identity B gives unit vectors") {
  const auto seq = seq_of({{1, 3, 0.5}, {1, 1, 2}, {1, 0.2, 0.2}});
  const auto sig = covariance_sequence(Eigen::Matrix3d::Identity(), seq);
  Rng rng(2);
  for (int n = 0; n < 3; ++n) {
    CHECK(up_to_sign(recover_column(sig, seq, n, rng), Eigen::Vector3d::Unit(n)) < 1e-10);
  }
}

TEST_CASE("random three-variable round trip and row duality") {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Matrix3d B;
    for (int i = 0; i < 9; ++i) B(i) = rng.normal();
    VarianceSequence seq;
    seq.lambdas.push_back(Eigen::Vector3d::Ones());
    for (int t = 1; t <= 3; ++t) {
      seq.lambdas.push_back(Eigen::Vector3d(0.2 + 2 * rng.uniform(), 0.2 + 2 * rng.uniform(),
                                            0.2 + 2 * rng.uniform()));
    }
    const auto sig = covariance_sequence(B, seq);
    const Eigen::Matrix3d B0 = B.inverse();
    for (int n = 0; n < 3; ++n) {
      const Eigen::VectorXd c = recover_column(sig, seq, n, rng);
      CHECK(up_to_sign(c, B.col(n)) < 1e-8 * std::max(1.0, B.col(n).norm()));
      const Eigen::VectorXd r = recover_row(sig, seq, n, rng);
      CHECK(up_to_sign(r, B0.row(n).transpose()) < 1e-8 * std::max(1.0, B0.row(n).norm()));
    }
  }
}

TEST_CASE("equal patterns are reported as ambiguous") {
  const auto seq = seq_of({{1, 2, 3}, {1, 2, 3}, {1, 0.5, 1}});
  Eigen::Matrix3d B;
  B << 1, 0.2, 0.1, 0.3, 1, 0, 0, 0.4, 1;
  const auto sig = covariance_sequence(B, seq);
  Rng rng(4);
  CHECK_THROWS_AS(recover_column(sig, seq, 0, rng), IdentificationAmbiguous);
  const ProbeResult p = rotation_ambiguity_probe(sig, seq, 2, rng, 50);
  CHECK(p.column_deviation < 1e-10);
  CHECK(p.per_column[0] > 0.1);
  CHECK(p.per_column[1] > 0.1);
  CHECK(p.max_fit_error < 1e-10);
  const RecoveredStructure r = recover_structure(sig, rng);
  int identified = 0;
  for (bool b : r.identified) identified += b;
  CHECK(identified == 1);
}

TEST_CASE("orthogonal B leaves the probed unit column unchanged") {
  const auto seq = seq_of({{1, 5}, {1, 1}, {1, 1}});
  const auto sig = covariance_sequence(Eigen::Matrix3d::Identity(), seq);
  Rng rng(5);
  const ProbeResult p = rotation_ambiguity_probe(sig, seq, 0, rng, 20);
  CHECK(p.column_deviation == 0.0);
}

TEST_CASE("identified impulse responses are rotation invariant") {
  const auto seq = seq_of({{1, 2, 3}, {1, 2, 3}, {1, 0.5, 1}});
  Eigen::Matrix3d B;
  B << 1, 0.2, 0.1, 0.3, 1, 0, 0, 0.4, 1;
  Eigen::Matrix3d A1 = 0.3 * Eigen::Matrix3d::Identity();
  A1(0, 2) = 0.2;
  const auto phi = compute_phi({A1}, 8);
  Rng rng(6);
  CHECK(irf_rotation_deviation(phi, B, seq, 2, rng, 100) < 1e-10);
  CHECK(irf_rotation_deviation(phi, B, seq, 0, rng, 100) > 1e-3);
}

TEST_CASE("sigmas inconsistent with the stated patterns are rejected") {
  Eigen::Matrix2d B;
  B << 1, 1, 0, 1;
  const auto sig = covariance_sequence(B, seq_of({{1, 2}, {1, 1}}));
  Rng rng(7);
  CHECK_THROWS_AS(recover_column(sig, seq_of({{1, 4}, {1, 1}}), 0, rng), DomainError);
}
