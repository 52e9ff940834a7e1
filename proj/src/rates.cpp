#include "atypia/rates.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "atypia/basis.hpp"
#include "atypia/errors.hpp"
#include "atypia/roots.hpp"

namespace atypia {

namespace {

constexpr double kTieTol = 1e-12;

DensityMatrix two_level_state(int m, int k, double mass) {
  Eigen::VectorXd p(m);
  for (int i = 0; i < m; ++i) p[i] = i < k ? mass / k : (1.0 - mass) / (m - k);
  return DensityMatrix::diagonal(p);
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::ClosedForm: return "closed_form";
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NotConverged: return "not_converged";
  }
  return "unknown";
}

double rate_qubit(double t_norm) {
  if (!(t_norm >= 0.0 && t_norm <= 1.0)) throw DomainError("rate_qubit: |t| must lie in [0,1]");
  if (t_norm == 1.0) return kInfinity;
  return -0.5 * std::log1p(-t_norm * t_norm);
}

RateResult rate_max_eigenvalue(double eps, int m) {
  if (m < 2) throw DomainError("rate_max_eigenvalue: m must be at least 2");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("rate_max_eigenvalue: eps must lie in (0,1)");
  RateResult out;
  out.dim = m;
  if (eps == 1.0) {
    out.rate = kInfinity;
    return out;
  }
  out.rate = -(std::log1p((m - 1) * eps) + (m - 1) * std::log1p(-eps)) / m;
  out.minimizer = two_level_state(m, 1, (1.0 + (m - 1) * eps) / m);
  return out;
}

RateResult rate_binary_measurement(double q, int m0, int m) {
  if (!(m0 >= 1 && m0 < m)) throw DomainError("rate_binary_measurement: need 1 <= m0 < m");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("rate_binary_measurement: q must lie in [0,1]");
  RateResult out;
  out.dim = m;
  out.rate = binary_rel_entropy(double(m0) / m, q);
  if (std::isfinite(out.rate) && q > 0.0 && q < 1.0) out.minimizer = two_level_state(m, m0, q);
  return out;
}

RateResult rate_trace_distance(double t, int m) {
  if (m < 2) throw DomainError("rate_trace_distance: m must be at least 2");
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("rate_trace_distance: t must lie in (0,1)");
  RateResult out;
  out.dim = m;
  out.rate = kInfinity;
  const int top = static_cast<int>(std::floor(m * (1.0 - t) + 1e-9));
  for (int k = 1; k <= top; ++k) {
    const double a = double(k) / m;
    if (a + t >= 1.0) break;
    const double v = binary_rel_entropy(a, a + t);
    if (v < out.rate - kTieTol) {
      out.rate = v;
      out.diagnostics.argmin_index = k;
    }
  }
  if (out.diagnostics.argmin_index > 0) {
    const int k = out.diagnostics.argmin_index;
    out.minimizer = two_level_state(m, k, double(k) / m + t);
  }
  return out;
}

RateResult rate_entropy(double eta, int m) {
  if (m < 2) throw DomainError("rate_entropy: m must be at least 2");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("rate_entropy: eta must lie in (0,1)");
  RateResult out;
  out.dim = m;
  out.rate = kInfinity;
  double best_r = 0.0;
  for (int mu = 1; mu < m; ++mu) {
    double r;
    try {
      r = solve_entropy_root(mu, eta, m);
    } catch (const NumericalError&) {
      continue;  // this split cannot reach entropy eta ln m from below mu/m
    }
    const double v = binary_rel_entropy(double(mu) / m, r);
    if (v < out.rate - kTieTol) {
      out.rate = v;
      out.diagnostics.argmin_index = mu;
      best_r = r;
    }
  }
  if (out.diagnostics.argmin_index < 0) throw NumericalError("rate_entropy: no admissible split");
  out.minimizer = two_level_state(m, out.diagnostics.argmin_index, best_r);
  if (out.minimizer->spectrum().min() < 1e-8) {
    out.diagnostics.warnings.push_back("minimizer is nearly rank deficient; the rate diverges as eta -> 0");
  }
  return out;
}

RateResult rate_expectation(double w, const HermitianObservable& W) {
  const int m = W.dim();
  const double scale = std::max(1.0, W.matrix().cwiseAbs().maxCoeff());
  if (std::abs(W.trace()) > 1e-12 * scale * m) {
    throw ValidationError("rate_expectation: W must be traceless");
  }
  const double nu = w == 0.0 ? 0.0 : solve_nu(w, W);  // w = 0 is attained by pi
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W.matrix());
  const Eigen::VectorXd a = ((1.0 - w * nu) + nu * es.eigenvalues().array()).matrix();
  RateResult out;
  out.dim = m;
  out.rate = a.array().log().sum() / m;
  out.diagnostics.multiplier = nu;
  Eigen::VectorXd p = a.cwiseInverse() / m;
  const double s = p.sum();
  out.diagnostics.constraint_residual = std::abs(s - 1.0);
  p /= s;
  Eigen::MatrixXcd rho = es.eigenvectors() * p.asDiagonal() * es.eigenvectors().adjoint();
  out.minimizer = DensityMatrix::trusted(0.5 * (rho + rho.adjoint()));
  return out;
}

double nu_star_m3(double w) {
  if (!(std::abs(w) < 1.0)) throw DomainError("nu_star_m3: |w| must be below 1");
  if (w == 0.0) throw DomainError("nu_star_m3: undefined at w = 0 (limit -3w/2)");
  // (1 - 3w^2 - sqrt(1 + 3w^2)) / (3w(1 - w^2)), rationalized to avoid
  // cancellation at small w.
  return -3.0 * w / (1.0 - 3.0 * w * w + std::sqrt(1.0 + 3.0 * w * w));
}

double rate_w3(double w) {
  if (!(std::abs(w) < 1.0)) throw DomainError("rate_w3: |w| must be below 1");
  if (w == 0.0) return 0.0;
  const double nu = nu_star_m3(w);
  double acc = 0.0;
  for (int k = -1; k <= 1; ++k) acc += std::log(1.0 - (w - k) * nu);
  return acc / 3.0;
}

int GaussianRatePoint::dim() const {
  const int m = static_cast<int>(std::lround(std::sqrt(double(t.size()))));
  if (m < 1 || m * m != t.size()) throw ValidationError("GaussianRatePoint: length must be m^2");
  return m;
}

double gaussian_sanov_rate(const GaussianRatePoint& point) {
  const int m = point.dim();
  const Eigen::MatrixXcd s = operator_basis(m).combine(point.t) / (2.0 * m);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(s, Eigen::EigenvaluesOnly).eigenvalues();
  if (ev.minCoeff() <= kRankTol * std::max(1.0, ev.maxCoeff())) return kInfinity;
  return (ev.array() - 1.0 - ev.array().log()).sum();
}

double gaussian_rate_scale_min(const GaussianRatePoint& point) {
  const int m = point.dim();
  const Eigen::MatrixXcd M = operator_basis(m).combine(point.t);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(M, Eigen::EigenvaluesOnly).eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  if (top == 0.0) throw ValidationError("gaussian_rate_scale_min: t.A must be nonzero");
  if (ev.minCoeff() < -kPsdTol * top) throw DomainError("gaussian_rate_scale_min: t.A is not PSD");
  if (ev.minCoeff() < kRankTol * std::max(1.0, ev.maxCoeff())) return kInfinity;
  const double tr = ev.sum();
  return -(ev.array() * (m / tr)).log().sum();
}

double coherence_rate_upper(double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw DomainError("coherence_rate_upper: omega must lie in (0,1)");
  return -std::log1p(-omega);
}

double coherence_rate_levy(double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw DomainError("coherence_rate_levy: omega must lie in (0,1)");
  const double pi = std::numbers::pi;
  return omega * omega / (36.0 * pi * pi * pi * std::numbers::ln2);
}

double coherence_dstar(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0) || !(x < s)) return kInfinity;
  return 0.5 * s - std::log(0.5 * (s - x)) - 1.0;
}

double coherence_dstar_infimum(double kappa) {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw DomainError("coherence_dstar_infimum: kappa must lie in [0,1)");
  auto inner = [kappa](double s) {
    return golden_min([s](double x) { return coherence_dstar(s, x); }, kappa * s, s * (1.0 - 1e-12), 1e-13 * s);
  };
  return golden_min(inner, 1e-6, 64.0, 1e-9);
}

LevyKind parse_levy_kind(const std::string& name) {
  if (name == "max-eig") return LevyKind::MaxEigenvalue;
  if (name == "entropy") return LevyKind::Entropy;
  if (name == "expectation-popescu") return LevyKind::ExpectationPopescu;
  if (name == "expectation" || name == "expectation-reimann") return LevyKind::ExpectationReimann;
  throw ValidationError("unknown comparison kind '" + name + "'");
}

double levy_comparison_rate(LevyKind kind, const LevyParams& p) {
  const double pi3 = std::pow(std::numbers::pi, 3);
  if (p.m < 2) throw DomainError("levy_comparison_rate: m must be at least 2");
  switch (kind) {
    case LevyKind::MaxEigenvalue:
      return (p.m - 1.0) * (p.m - 1.0) * p.eps * p.eps / 14.0;
    case LevyKind::Entropy:
      return p.m * p.delta * p.delta / (8.0 * std::numbers::pi * std::numbers::pi);
    case LevyKind::ExpectationPopescu:
      return p.m * p.w * p.w / (18.0 * pi3 * p.w_operator_norm * p.w_operator_norm);
    case LevyKind::ExpectationReimann:
      return 2.0 * p.m * p.w * p.w / (9.0 * pi3 * p.w_spread * p.w_spread);
  }
  throw ValidationError("levy_comparison_rate: unknown kind");
}

}  // namespace atypia
