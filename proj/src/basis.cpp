#include "atypia/basis.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "atypia/errors.hpp"

namespace atypia {

OperatorBasis::OperatorBasis(int dim) : dim_(dim) {
  if (dim < 1) throw ValidationError("operator basis dimension must be positive");
  using C = std::complex<double>;
  const double m = dim;
  // Standard Gell-Mann normalization is Tr[L_a L_b] = 2 delta_ab.
  const double scale = std::sqrt(m / 2.0);
  ops_.push_back(Eigen::MatrixXcd::Identity(dim, dim));
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
      a(j, k) = a(k, j) = scale;
      ops_.push_back(std::move(a));
    }
  }
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
      a(j, k) = C(0, -scale);
      a(k, j) = C(0, scale);
      ops_.push_back(std::move(a));
    }
  }
  for (int l = 1; l < dim; ++l) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    const double c = std::sqrt(2.0 / (l * (l + 1.0))) * scale;
    for (int j = 0; j < l; ++j) a(j, j) = c;
    a(l, l) = -l * c;
    // Place sigma_z-like element last so m = 2 reproduces (x, y, z).
    ops_.push_back(std::move(a));
  }
}

Eigen::MatrixXcd OperatorBasis::combine(const Eigen::VectorXd& t) const {
  if (t.size() != size()) throw ValidationError("coordinate vector must have length m^2");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (int r = 0; r < size(); ++r) out += t[r] * ops_[r];
  return out;
}

Eigen::VectorXd OperatorBasis::coordinates(const Eigen::MatrixXcd& hermitian) const {
  if (hermitian.rows() != dim_ || hermitian.cols() != dim_) {
    throw ValidationError("coordinates: dimension mismatch");
  }
  Eigen::VectorXd t(size());
  for (int r = 0; r < size(); ++r) t[r] = (ops_[r] * hermitian).trace().real() / dim_;
  return t;
}

const OperatorBasis& operator_basis(int dim) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<OperatorBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[dim];
  if (!slot) slot = std::make_unique<OperatorBasis>(dim);
  return *slot;
}

}  // namespace atypia
