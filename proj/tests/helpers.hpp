// Test inputs: random states, unitaries and observables from std::mt19937.
#pragma once

#include <random>

#include <Eigen/Dense>

#include "atypia/qstate.hpp"

namespace testing_util {

inline Eigen::MatrixXcd gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = {g(rng), g(rng)};
  return a;
}

/// Full-rank (almost surely) state with `rank` Gaussian columns.
inline atypia::DensityMatrix random_state(int m, std::mt19937_64& rng, int rank = -1) {
  const Eigen::MatrixXcd g = gaussian_matrix(m, rank < 0 ? m : rank, rng);
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return atypia::DensityMatrix(rho);
}

inline Eigen::MatrixXcd random_unitary(int m, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gaussian_matrix(m, m, rng));
  return qr.householderQ() * Eigen::MatrixXcd::Identity(m, m);
}

inline Eigen::MatrixXcd conj(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& a) { return u * a * u.adjoint(); }

inline atypia::DensityMatrix rotate(const atypia::DensityMatrix& rho, const Eigen::MatrixXcd& u) {
  Eigen::MatrixXcd r = conj(u, rho.matrix());
  return atypia::DensityMatrix(0.5 * (r + r.adjoint()));
}

inline double uniform(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace testing_util
