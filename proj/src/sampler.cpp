#include "atypia/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "atypia/errors.hpp"

namespace atypia {

namespace {

void require_dims(int m, int n) {
  if (m < 1 || n < 1) throw ValidationError("sampler dimensions must be positive");
}

double log_sum_exp(const std::vector<double>& xs) {
  const double top = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - top);
  return top + std::log(acc);
}

}  // namespace

GinibreDraw sample_ginibre(int m, int n, SeededStream& stream) {
  require_dims(m, n);
  GinibreDraw draw{m, n, Eigen::MatrixXcd(m, n)};
  // Column-major fill: one environment index at a time.
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < m; ++k) draw.g(k, l) = stream.complex_normal();
  }
  return draw;
}

DensityMatrix sample_induced_state(int m, int n, SeededStream& stream) {
  const GinibreDraw draw = sample_ginibre(m, n, stream);
  Eigen::MatrixXcd s = draw.g * draw.g.adjoint();
  s /= s.trace().real();
  return DensityMatrix::trusted(s);
}

Eigen::VectorXcd sample_haar_pure(int dim, SeededStream& stream) {
  if (dim < 1) throw ValidationError("sample_haar_pure: dimension must be positive");
  Eigen::VectorXcd v(dim);
  for (int k = 0; k < dim; ++k) v[k] = stream.complex_normal();
  return v / v.norm();
}

TiltedProposal::TiltedProposal(DensityMatrix target, double mixing, Eigen::MatrixXcd sigma)
    : target_(std::move(target)), mixing_(mixing), sigma_(std::move(sigma)) {
  const int m = dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sigma_);
  const Eigen::VectorXd ev = es.eigenvalues();
  log_det_ = ev.array().log().sum();
  sigma_inv_ = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  sigma_inv_ = 0.5 * (sigma_inv_ + sigma_inv_.adjoint());
  inv_eigs_ = ev.cwiseInverse().reverse();
  chol_ = Eigen::LLT<Eigen::MatrixXcd>(sigma_).matrixL();
  identity_ = (sigma_ - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff() == 0.0;
}

TiltedProposal make_tilted_proposal(const DensityMatrix& target) {
  const int m = target.dim();
  const double lam_min = target.spectrum().min();
  double gamma = 0.0;
  if (lam_min < kTiltFloor) {
    // (1 - gamma) lam_min + gamma / m = floor
    gamma = (kTiltFloor - lam_min) / (1.0 / m - lam_min);
  }
  Eigen::MatrixXcd floored = (1.0 - gamma) * target.matrix() +
                             gamma * Eigen::MatrixXcd::Identity(m, m) / double(m);
  Eigen::MatrixXcd sigma = double(m) * floored;
  const bool is_pi = (target.matrix() - Eigen::MatrixXcd::Identity(m, m) / double(m))
                         .cwiseAbs()
                         .maxCoeff() <= 1e-15;
  if (is_pi) sigma = Eigen::MatrixXcd::Identity(m, m);
  return TiltedProposal(target, gamma, std::move(sigma));
}

TiltedDraw sample_tilted_induced_state(const TiltedProposal& proposal, int n, SeededStream& stream) {
  const int m = proposal.dim();
  require_dims(m, n);
  const Eigen::MatrixXcd& L = proposal.factor();
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(m, m);
  Eigen::VectorXcd z(m);
  double quad = 0.0;  // sum_l |z_l|^2 - |g_l|^2
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < m; ++k) z[k] = stream.complex_normal();
    const Eigen::VectorXcd g = L * z;
    quad += z.squaredNorm() - g.squaredNorm();
    s.selfadjointView<Eigen::Lower>().rankUpdate(g);
  }
  s = s.selfadjointView<Eigen::Lower>();
  const double tr = s.trace().real();
  DensityMatrix rho = DensityMatrix::trusted(s / tr);
  const double log_w = 0.5 * quad + n * proposal.log_det();
  const double log_w_dir = direction_log_weight(proposal, rho, n);
  return TiltedDraw{std::move(rho), log_w, log_w_dir};
}

double column_log_weight(const TiltedProposal& proposal, const Eigen::VectorXcd& column) {
  const double quad_inv = (column.adjoint() * proposal.covariance_inverse() * column)(0, 0).real();
  return -0.5 * column.squaredNorm() + 0.5 * quad_inv + proposal.log_det();
}

double direction_log_weight(const TiltedProposal& proposal, const DensityMatrix& rho, int n) {
  if (proposal.is_identity()) return 0.0;
  const int m = proposal.dim();
  const double a = (proposal.covariance_inverse() * rho.matrix()).trace().real();
  return n * proposal.log_det() + double(m) * n * std::log(a);
}

double orientation_averaged_log_weight(const TiltedProposal& proposal, const Spectrum& spectrum, int n) {
  if (proposal.dim() != 2 || spectrum.size() != 2) {
    throw ValidationError("orientation averaging is implemented for qubits only");
  }
  if (proposal.is_identity()) return 0.0;
  const Eigen::VectorXd& a = proposal.inverse_eigenvalues();
  const double alpha = 0.5 * (a[0] + a[1]);
  const double beta = 0.5 * (a[1] - a[0]);
  const double r = spectrum[0] - spectrum[1];
  const double k = 2.0 * n;  // m n with m = 2
  const double br = beta * r;
  double log_avg;
  if (br <= 1e-14 * alpha) {
    log_avg = -k * std::log(alpha);
  } else {
    // E_x (alpha + beta r x)^{-k}, x uniform on [-1, 1]
    const double lo = std::log(alpha - br);
    const double hi = std::log(alpha + br);
    const double d = (1.0 - k) * (hi - lo);
    log_avg = (1.0 - k) * lo + std::log(-std::expm1(d)) - std::log(2.0 * br * (k - 1.0));
  }
  return n * proposal.log_det() - log_avg;
}

ProposalMixture::ProposalMixture(std::vector<TiltedProposal> components, std::vector<double> probabilities)
    : components_(std::move(components)) {
  if (components_.empty() || components_.size() != probabilities.size()) {
    throw ValidationError("mixture needs one probability per component");
  }
  const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  double run = 0.0;
  for (double p : probabilities) {
    if (!(p > 0.0)) throw ValidationError("mixture probabilities must be positive");
    log_probs_.push_back(std::log(p / total));
    run += p / total;
    cumulative_.push_back(run);
  }
  cumulative_.back() = 1.0;
  for (const auto& c : components_) {
    if (c.dim() != components_.front().dim()) throw ValidationError("mixture dimension mismatch");
  }
}

DensityMatrix ProposalMixture::sample(int n, SeededStream& stream) const {
  std::size_t j = 0;
  if (components_.size() > 1) {
    const double u = stream.uniform();
    j = std::lower_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin();
    j = std::min(j, components_.size() - 1);
  }
  return sample_tilted_induced_state(components_[j], n, stream).state;
}

double ProposalMixture::log_weight(const DensityMatrix& rho, int n, bool orientation_averaged) const {
  std::vector<double> terms(components_.size());
  const Spectrum spec = orientation_averaged ? rho.spectrum() : Spectrum{};
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const double lw = orientation_averaged ? orientation_averaged_log_weight(components_[j], spec, n)
                                           : direction_log_weight(components_[j], rho, n);
    terms[j] = log_probs_[j] - lw;
  }
  return -log_sum_exp(terms);
}

CoherenceStatistic coherence_statistic(const Eigen::VectorXcd& psi) {
  if (psi.size() == 0 || std::abs(psi.squaredNorm() - 1.0) > 1e-10) {
    throw ValidationError("coherence_statistic requires a unit vector");
  }
  CoherenceStatistic out{0.0, 0.0};
  for (Eigen::Index l = 0; l < psi.size(); ++l) {
    const double p = std::norm(psi[l]);
    out.p_star = std::max(out.p_star, p);
    if (p > 0.0) out.coherence -= p * std::log(p);
  }
  return out;
}

}  // namespace atypia
