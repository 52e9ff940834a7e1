#pragma once

#include <vector>

#include <Eigen/Dense>

#include "atypia/qstate.hpp"
#include "atypia/random.hpp"

namespace atypia {

/// m x n matrix with i.i.d. entries X + iY, X and Y standard normal.
/// Its columns are the environment slices of an unnormalized bipartite vector.
struct GinibreDraw {
  int m = 0;
  int n = 0;
  Eigen::MatrixXcd g;
};

GinibreDraw sample_ginibre(int m, int n, SeededStream& stream);

/// G G^dagger / Tr[G G^dagger] for a fresh Ginibre draw: the reduced state of a
/// uniformly random pure state on C^m (x) C^n.
DensityMatrix sample_induced_state(int m, int n, SeededStream& stream);

/// Uniformly (unitarily invariant) distributed unit vector in C^dim.
Eigen::VectorXcd sample_haar_pure(int dim, SeededStream& stream);

/// Smallest eigenvalue a proposal target may have after regularization.
inline constexpr double kTiltFloor = 1e-6;

/// Importance-sampling proposal: Gaussian columns with covariance
/// Sigma = m * sigma, where sigma is the (floored) target state.
///
/// With Sigma = m sigma the exponential tilt of the column law has the
/// normalized second moment sigma, so proposal draws concentrate at the target.
class TiltedProposal {
 public:
  const DensityMatrix& target() const { return target_; }
  /// Mixing weight gamma in sigma_floored = (1 - gamma) sigma + gamma pi.
  double mixing() const { return mixing_; }
  int dim() const { return static_cast<int>(sigma_.rows()); }
  const Eigen::MatrixXcd& covariance() const { return sigma_; }
  const Eigen::MatrixXcd& covariance_inverse() const { return sigma_inv_; }
  /// Lower Cholesky factor L with Sigma = L L^dagger.
  const Eigen::MatrixXcd& factor() const { return chol_; }
  double log_det() const { return log_det_; }
  /// Eigenvalues of Sigma^{-1}, ascending.
  const Eigen::VectorXd& inverse_eigenvalues() const { return inv_eigs_; }
  bool is_identity() const { return identity_; }

  friend TiltedProposal make_tilted_proposal(const DensityMatrix& target);

 private:
  TiltedProposal(DensityMatrix target, double mixing, Eigen::MatrixXcd sigma);

  DensityMatrix target_;
  double mixing_;
  Eigen::MatrixXcd sigma_;
  Eigen::MatrixXcd sigma_inv_;
  Eigen::MatrixXcd chol_;
  double log_det_;
  Eigen::VectorXd inv_eigs_;
  bool identity_;
};

TiltedProposal make_tilted_proposal(const DensityMatrix& target);

struct TiltedDraw {
  DensityMatrix state;
  /// log of (standard Gaussian density / proposal density) of the full draw G.
  double log_weight;
  /// Same ratio for the direction G/||G|| only (Gaussian norm integrated out).
  double log_weight_direction;
};

/// Draws n columns g_l ~ CN(0, Sigma) and returns the normalized state with
/// its log likelihood ratios. Both weights have proposal expectation 1; the
/// direction weight is the conditional expectation of the Gaussian one given
/// the state, so it is never noisier.
TiltedDraw sample_tilted_induced_state(const TiltedProposal& proposal, int n, SeededStream& stream);

/// Columns-only helper used by the weight tests: log G(z) - log q(z) for a
/// single complex column z under the proposal.
double column_log_weight(const TiltedProposal& proposal, const Eigen::VectorXcd& column);

/// log(nominal / proposal) density ratio of the state direction:
/// n log det Sigma + m n log Tr[Sigma^{-1} rho].
double direction_log_weight(const TiltedProposal& proposal, const DensityMatrix& rho, int n);

/// Direction ratio against the proposal averaged over all unitary rotations
/// of Sigma. Depends on rho only through its spectrum, which is what makes it
/// usable for unitarily invariant events. Closed form; qubits only.
double orientation_averaged_log_weight(const TiltedProposal& proposal, const Spectrum& spectrum, int n);

/// Finite mixture of tilted proposals with fixed component probabilities.
class ProposalMixture {
 public:
  ProposalMixture(std::vector<TiltedProposal> components, std::vector<double> probabilities);

  int dim() const { return components_.front().dim(); }
  const std::vector<TiltedProposal>& components() const { return components_; }

  /// Draws a component, then a state from it.
  DensityMatrix sample(int n, SeededStream& stream) const;
  /// log(nominal / mixture) for the state direction. With `orientation_averaged`
  /// each component density is averaged over rotations (qubits only).
  double log_weight(const DensityMatrix& rho, int n, bool orientation_averaged) const;

 private:
  std::vector<TiltedProposal> components_;
  std::vector<double> log_probs_;
  std::vector<double> cumulative_;
};

struct CoherenceStatistic {
  double p_star;     ///< max_l |<e_l|psi>|^2
  double coherence;  ///< Shannon entropy (nats) of the squared amplitudes
};

CoherenceStatistic coherence_statistic(const Eigen::VectorXcd& psi);

}  // namespace atypia
