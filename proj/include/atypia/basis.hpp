#pragma once

#include <vector>

#include <Eigen/Dense>

namespace atypia {

/// Hermitian operator basis {A_0 = I, A_1, ..., A_{m^2-1}} on C^m.
///
/// A_1.. are the generalized Gell-Mann matrices rescaled so that
/// (1/m) Tr[A_r A_s] = delta_rs. Ordering: symmetric off-diagonal (j<k),
/// antisymmetric off-diagonal (j<k), then diagonal l = 1..m-1. For m = 2 this
/// is (sigma_x, sigma_y, sigma_z), so coordinates coincide with the Bloch vector.
class OperatorBasis {
 public:
  explicit OperatorBasis(int dim);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(ops_.size()); }
  const Eigen::MatrixXcd& operator[](int r) const { return ops_[r]; }

  /// t . A = sum_r t_r A_r. `t` has length m^2.
  Eigen::MatrixXcd combine(const Eigen::VectorXd& t) const;
  /// Coordinates t_r = (1/m) Tr[A_r M] of a Hermitian M; inverse of `combine`.
  Eigen::VectorXd coordinates(const Eigen::MatrixXcd& hermitian) const;

 private:
  int dim_;
  std::vector<Eigen::MatrixXcd> ops_;
};

/// Shared instance per dimension.
const OperatorBasis& operator_basis(int dim);

}  // namespace atypia
