#pragma once

#include <Eigen/Dense>

#include "atypia/errors.hpp"

namespace atypia {

/// Tolerances shared by the state types.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;
/// Eigenvalue lambda is treated as zero when lambda < kRankTol * max(1, lambda_max).
inline constexpr double kRankTol = 1e-12;

/// Eigenvalues sorted in nonincreasing order.
class Spectrum {
 public:
  Spectrum() = default;
  /// Sorts `values` descending. Each value must lie in [-1e-12, 1 + 1e-12].
  explicit Spectrum(Eigen::VectorXd values);

  int size() const { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](int k) const { return values_[k]; }
  double max() const { return values_[0]; }
  double min() const { return values_[values_.size() - 1]; }
  double sum() const { return values_.sum(); }

 private:
  Eigen::VectorXd values_;
};

/// Unit-trace positive semidefinite Hermitian matrix.
///
/// The checked constructor enforces Hermiticity, positivity and unit trace to
/// 1e-12. `trusted` skips the checks and only symmetrizes; samplers use it in
/// hot loops where the invariants hold by construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Eigen::MatrixXcd& entries);

  static DensityMatrix trusted(const Eigen::MatrixXcd& entries);
  static DensityMatrix maximally_mixed(int dim);
  /// Diagonal state with the given (probability) vector on the diagonal.
  static DensityMatrix diagonal(const Eigen::VectorXd& probabilities);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Spectrum spectrum() const;

 private:
  struct TrustedTag {};
  DensityMatrix(TrustedTag, const Eigen::MatrixXcd& entries);

  Eigen::MatrixXcd rho_;
};

/// Hermitian operator, optionally required to be traceless.
class HermitianObservable {
 public:
  explicit HermitianObservable(const Eigen::MatrixXcd& entries, bool require_traceless = false);

  static HermitianObservable diagonal(const Eigen::VectorXd& values);
  /// Projector onto the first `rank` basis vectors of C^dim.
  static HermitianObservable projector(int dim, int rank);

  int dim() const { return static_cast<int>(w_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return w_; }
  double trace() const { return w_.trace().real(); }
  bool traceless() const;
  /// Ascending eigenvalues.
  Eigen::VectorXd eigenvalues() const;
  double expectation(const DensityMatrix& rho) const;

 private:
  Eigen::MatrixXcd w_;
};

/// Real 3-vector with norm at most 1.
class BlochVector {
 public:
  BlochVector() : t_(Eigen::Vector3d::Zero()) {}
  explicit BlochVector(const Eigen::Vector3d& t);
  BlochVector(double x, double y, double z) : BlochVector(Eigen::Vector3d(x, y, z)) {}

  const Eigen::Vector3d& vector() const { return t_; }
  double norm() const { return t_.norm(); }

 private:
  Eigen::Vector3d t_;
};

double rel_entropy_vs_pi(const Spectrum& spectrum);
/// D(pi||rho) = -(1/m) Tr ln(m rho); +inf for rank-deficient rho.
double rel_entropy_vs_pi(const DensityMatrix& rho);

double von_neumann_entropy(const Spectrum& spectrum);
double von_neumann_entropy(const DensityMatrix& rho);

/// (1/2) ||rho - sigma||_1.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
/// Trace distance minimized over the unitary orbit: (1/2) sum |a_k - b_k| of sorted spectra.
double spectral_distance(const Spectrum& a, const Spectrum& b);

/// Binary relative entropy alpha ln(alpha/beta) + (1-alpha) ln((1-alpha)/(1-beta)).
double binary_rel_entropy(double alpha, double beta);

struct BinaryRelEntropyDerivatives {
  double d_alpha;
  double d_beta;
  double d2_alpha;
  double d2_beta;
};

/// Closed-form partial derivatives; requires 0 < alpha, beta < 1.
BinaryRelEntropyDerivatives binary_rel_entropy_derivatives(double alpha, double beta);

DensityMatrix qubit_from_bloch(const BlochVector& t);
BlochVector bloch_from_qubit(const DensityMatrix& rho);

/// Pauli matrices (x, y, z).
const Eigen::Matrix2cd& pauli(int axis);

}  // namespace atypia
