#pragma once

// Brute-force identification checks on covariance sequences
// Sigma_t = B Lambda_t B' with Lambda_0 = I.

#include <Eigen/Dense>
#include <vector>

#include "hsvar/rng.hpp"

namespace hsvar::theory {

/// lambdas[t] holds the N relative variances at period t; lambdas[0] is all ones.
struct VarianceSequence {
  std::vector<Eigen::VectorXd> lambdas;

  Eigen::Index N() const { return lambdas.empty() ? 0 : lambdas.front().size(); }
  std::size_t periods() const { return lambdas.size(); }
  /// (lambda_{n.0}, lambda_{n.1}, ...) for equation n.
  Eigen::VectorXd pattern(Eigen::Index n) const;

  /// Builds the sequence from one variance vector per equation.
  static VarianceSequence from_equations(const std::vector<Eigen::VectorXd>& per_equation);
};

/// Throws DomainError unless entries are positive and period 0 is all ones.
void validate(const VarianceSequence& seq);

/// True iff equation n's variance pattern differs from every other equation's
/// in at least one coordinate by more than tol.
bool check_condition(const VarianceSequence& seq, Eigen::Index n, double tol = 1e-12);

/// True iff the patterns of equations i and j differ somewhere by more than tol.
bool check_condition_pair(const VarianceSequence& seq, Eigen::Index i, Eigen::Index j,
                          double tol = 1e-12);

/// Sigma_t = B Lambda_t B' for every period of the sequence.
std::vector<Eigen::MatrixXd> covariance_sequence(const Eigen::MatrixXd& B,
                                                 const VarianceSequence& seq);

/// Column n of B up to sign, first nonzero coordinate made positive.
/// Throws IdentificationAmbiguous when the condition fails and DomainError
/// when the sigmas do not fit the variance pattern.
Eigen::VectorXd recover_column(const std::vector<Eigen::MatrixXd>& sigmas,
                               const VarianceSequence& seq, Eigen::Index n, Rng& rng);

/// Row n of B0 = B^{-1} up to sign, recovered from the inverse sequence with
/// reciprocal variance patterns.
Eigen::VectorXd recover_row(const std::vector<Eigen::MatrixXd>& sigmas,
                            const VarianceSequence& seq, Eigen::Index n, Rng& rng);

struct RecoveredStructure {
  Eigen::MatrixXd B;                  ///< one recovered column per equation
  std::vector<Eigen::VectorXd> patterns;  ///< fitted variance pattern per column
  std::vector<bool> identified;
};

/// Label-free decomposition of the sequence. Columns sharing a pattern are
/// returned as an arbitrary orthogonal basis of their span and flagged as
/// not identified.
RecoveredStructure recover_structure(const std::vector<Eigen::MatrixXd>& sigmas, Rng& rng,
                                     double pattern_tol = 1e-8);

/// Same decomposition with known labels; column n matches equation n.
RecoveredStructure recover_structure(const std::vector<Eigen::MatrixXd>& sigmas,
                                     const VarianceSequence& seq, Rng& rng);

/// Haar-distributed orthogonal matrix of size k.
Eigen::MatrixXd haar_orthogonal(Eigen::Index k, Rng& rng);

/// Block-orthogonal Q that rotates freely within groups of equations sharing
/// a variance pattern and fixes every other coordinate.
Eigen::MatrixXd random_admissible_rotation(const VarianceSequence& seq, Rng& rng);

struct ProbeResult {
  double column_deviation = 0.0;        ///< max over rotations for column n
  std::vector<double> per_column;       ///< max over rotations, sign-adjusted
  double max_fit_error = 0.0;           ///< relative Frobenius misfit of B Q Lambda Q' B'
};

ProbeResult rotation_ambiguity_probe(const std::vector<Eigen::MatrixXd>& sigmas,
                                     const VarianceSequence& seq, Eigen::Index n, Rng& rng,
                                     int n_rotations = 100);

/// Largest change in column n of Phi_i B across admissible rotations of B.
double irf_rotation_deviation(const std::vector<Eigen::MatrixXd>& phi, const Eigen::MatrixXd& B,
                              const VarianceSequence& seq, Eigen::Index n, Rng& rng,
                              int n_rotations = 100);

}  // namespace hsvar::theory
