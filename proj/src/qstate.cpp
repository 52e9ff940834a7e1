#include "atypia/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace atypia {

namespace {

double hermitian_defect(const Eigen::MatrixXcd& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
  if (a.rows() == 2) {
    // Qubit fast path; ascending like the general solver.
    const double mean = 0.5 * (a(0, 0).real() + a(1, 1).real());
    const double half = 0.5 * (a(0, 0).real() - a(1, 1).real());
    const double r = std::hypot(half, std::abs(a(1, 0)));
    return Eigen::Vector2d(mean - r, mean + r);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

bool below_rank_tolerance(double lambda, double lambda_max) {
  return lambda < kRankTol * std::max(1.0, lambda_max);
}

}  // namespace

Spectrum::Spectrum(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() == 0) throw ValidationError("spectrum must be nonempty");
  std::sort(values_.begin(), values_.end(), std::greater<>());
  if (!values_.allFinite()) throw ValidationError("spectrum has non-finite entries");
  if (values_[values_.size() - 1] < -kPsdTol || values_[0] > 1.0 + kPsdTol) {
    throw ValidationError("spectrum entries must lie in [0, 1]");
  }
}

DensityMatrix::DensityMatrix(const Eigen::MatrixXcd& entries) {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) {
    throw ValidationError("density matrix must be square and nonempty");
  }
  if (!entries.allFinite()) throw ValidationError("density matrix has non-finite entries");
  if (hermitian_defect(entries) > kHermitianTol) {
    throw ValidationError("density matrix is not Hermitian");
  }
  rho_ = 0.5 * (entries + entries.adjoint());
  if (std::abs(rho_.trace().real() - 1.0) > kTraceTol) {
    throw ValidationError("density matrix trace is not 1 (got " +
                          std::to_string(rho_.trace().real()) + ")");
  }
  if (hermitian_eigenvalues(rho_)[0] < -kPsdTol) {
    throw ValidationError("density matrix is not positive semidefinite");
  }
}

DensityMatrix::DensityMatrix(TrustedTag, const Eigen::MatrixXcd& entries)
    : rho_(0.5 * (entries + entries.adjoint())) {}

DensityMatrix DensityMatrix::trusted(const Eigen::MatrixXcd& entries) {
  return DensityMatrix(TrustedTag{}, entries);
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) throw ValidationError("dimension must be positive");
  return DensityMatrix(TrustedTag{}, Eigen::MatrixXcd::Identity(dim, dim) / double(dim));
}

DensityMatrix DensityMatrix::diagonal(const Eigen::VectorXd& probabilities) {
  return DensityMatrix(Eigen::MatrixXcd(probabilities.cast<std::complex<double>>().asDiagonal()));
}

Spectrum DensityMatrix::spectrum() const {
  Eigen::VectorXd ev = hermitian_eigenvalues(rho_);
  // Clip floating-point dust so the Spectrum range check is about real defects.
  for (auto& v : ev) v = std::clamp(v, 0.0, 1.0);
  return Spectrum(std::move(ev));
}

HermitianObservable::HermitianObservable(const Eigen::MatrixXcd& entries, bool require_traceless) {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) {
    throw ValidationError("observable must be square and nonempty");
  }
  if (!entries.allFinite()) throw ValidationError("observable has non-finite entries");
  if (hermitian_defect(entries) > kHermitianTol) throw ValidationError("observable is not Hermitian");
  w_ = 0.5 * (entries + entries.adjoint());
  if (require_traceless && !traceless()) throw ValidationError("observable must be traceless");
}

HermitianObservable HermitianObservable::diagonal(const Eigen::VectorXd& values) {
  return HermitianObservable(Eigen::MatrixXcd(values.cast<std::complex<double>>().asDiagonal()));
}

HermitianObservable HermitianObservable::projector(int dim, int rank) {
  if (dim < 1 || rank < 0 || rank > dim) throw ValidationError("projector rank out of range");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
  d.head(rank).setOnes();
  return diagonal(d);
}

bool HermitianObservable::traceless() const {
  const double scale = std::max(1.0, w_.cwiseAbs().maxCoeff());
  return std::abs(trace()) <= kTraceTol * scale;
}

Eigen::VectorXd HermitianObservable::eigenvalues() const { return hermitian_eigenvalues(w_); }

double HermitianObservable::expectation(const DensityMatrix& rho) const {
  if (rho.dim() != dim()) throw ValidationError("observable/state dimension mismatch");
  return (w_ * rho.matrix()).trace().real();
}

BlochVector::BlochVector(const Eigen::Vector3d& t) : t_(t) {
  if (!t.allFinite() || t.norm() > 1.0 + 1e-12) throw ValidationError("Bloch vector norm exceeds 1");
}

double rel_entropy_vs_pi(const Spectrum& spectrum) {
  const int m = spectrum.size();
  const double top = spectrum.max();
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    if (below_rank_tolerance(spectrum[k], top)) return kInfinity;
    acc += std::log(m * spectrum[k]);
  }
  // Roundoff can produce -1e-17 at pi.
  return std::max(0.0, -acc / m);
}

double rel_entropy_vs_pi(const DensityMatrix& rho) { return rel_entropy_vs_pi(rho.spectrum()); }

double von_neumann_entropy(const Spectrum& spectrum) {
  const double top = spectrum.max();
  double h = 0.0;
  for (int k = 0; k < spectrum.size(); ++k) {
    const double p = spectrum[k];
    if (!below_rank_tolerance(p, top)) h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.spectrum()); }

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ValidationError("trace_distance: dimension mismatch");
  const Eigen::VectorXd ev = hermitian_eigenvalues(rho.matrix() - sigma.matrix());
  return 0.5 * ev.cwiseAbs().sum();
}

double spectral_distance(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) throw ValidationError("spectral_distance: dimension mismatch");
  return 0.5 * (a.values() - b.values()).cwiseAbs().sum();
}

double binary_rel_entropy(double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) {
    throw DomainError("binary_rel_entropy: arguments must lie in [0, 1]");
  }
  auto term = [](double a, double b) -> double {
    if (a == 0.0) return 0.0;
    if (b == 0.0) return kInfinity;
    return a * std::log(a / b);
  };
  return term(alpha, beta) + term(1.0 - alpha, 1.0 - beta);
}

BinaryRelEntropyDerivatives binary_rel_entropy_derivatives(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0)) {
    throw DomainError("binary_rel_entropy_derivatives: arguments must lie in (0, 1)");
  }
  BinaryRelEntropyDerivatives d{};
  d.d_alpha = std::log(alpha / (1.0 - alpha) * (1.0 - beta) / beta);
  d.d_beta = -alpha / beta + (1.0 - alpha) / (1.0 - beta);
  d.d2_alpha = 1.0 / alpha + 1.0 / (1.0 - alpha);
  d.d2_beta = alpha / (beta * beta) + (1.0 - alpha) / ((1.0 - beta) * (1.0 - beta));
  return d;
}

const Eigen::Matrix2cd& pauli(int axis) {
  using C = std::complex<double>;
  static const Eigen::Matrix2cd sx = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  static const Eigen::Matrix2cd sy = (Eigen::Matrix2cd() << 0, C(0, -1), C(0, 1), 0).finished();
  static const Eigen::Matrix2cd sz = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  switch (axis) {
    case 0: return sx;
    case 1: return sy;
    case 2: return sz;
    default: throw ValidationError("pauli axis must be 0, 1 or 2");
  }
}

DensityMatrix qubit_from_bloch(const BlochVector& t) {
  Eigen::Matrix2cd rho = 0.5 * Eigen::Matrix2cd::Identity();
  for (int a = 0; a < 3; ++a) rho += 0.5 * t.vector()[a] * pauli(a);
  return DensityMatrix::trusted(rho);
}

BlochVector bloch_from_qubit(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw ValidationError("bloch_from_qubit requires a qubit state");
  Eigen::Vector3d t;
  for (int a = 0; a < 3; ++a) t[a] = (pauli(a) * rho.matrix()).trace().real();
  // A valid state has |t| <= 1; clip roundoff only.
  if (t.norm() > 1.0) t /= t.norm();
  return BlochVector(t);
}

}  // namespace atypia
