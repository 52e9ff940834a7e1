#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atypia/qstate.hpp"

namespace atypia {

enum class SolveStatus { ClosedForm, Converged, Infeasible, NotConverged };

const char* to_string(SolveStatus status);

struct Diagnostics {
  SolveStatus status = SolveStatus::ClosedForm;
  int iterations = 0;
  int restarts = 0;
  double constraint_residual = 0.0;
  double stationarity = 0.0;
  /// Discrete argmin (m' for trace distance, mu for entropy); -1 if not applicable.
  int argmin_index = -1;
  /// Scalar multiplier nu for the expectation family; NaN otherwise.
  double multiplier = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;
};

/// Infimum of D(pi||rho) over a set, with its minimizer when one exists.
struct RateResult {
  double rate = 0.0;
  int dim = 1;
  std::optional<DensityMatrix> minimizer;
  Diagnostics diagnostics;

  /// Large-deviation exponent: dim * rate.
  double exponent() const { return dim * rate; }
  std::optional<Spectrum> minimizer_spectrum() const {
    if (!minimizer) return std::nullopt;
    return minimizer->spectrum();
  }
};

double rate_qubit(double t_norm);
RateResult rate_max_eigenvalue(double eps, int m);
RateResult rate_binary_measurement(double q, int m0, int m);
RateResult rate_trace_distance(double t, int m);
RateResult rate_entropy(double eta, int m);
/// W must be traceless with w strictly inside its spectrum.
RateResult rate_expectation(double w, const HermitianObservable& W);

/// Closed-form multiplier for W = diag(1, 0, -1).
double nu_star_m3(double w);
double rate_w3(double w);

/// Coordinates t (length m^2) in the basis of `operator_basis(m)`.
struct GaussianRatePoint {
  Eigen::VectorXd t;
  int dim() const;
};

/// Tr[s - I - ln s] with s = t.A / 2m; +inf off the open PSD cone.
double gaussian_sanov_rate(const GaussianRatePoint& point);
/// min over scale lambda > 0 of gaussian_sanov_rate(lambda t) = -Tr ln(m rho(t)).
double gaussian_rate_scale_min(const GaussianRatePoint& point);

double coherence_rate_upper(double omega);
double coherence_rate_levy(double omega);
/// s/2 - ln((s - x)/2) - 1 with x = ||t||^2; +inf unless s > 0 and 0 <= x < s.
double coherence_dstar(double s, double x);
/// Numerical infimum of coherence_dstar over {x / s >= kappa}.
double coherence_dstar_infimum(double kappa);

enum class LevyKind { MaxEigenvalue, Entropy, ExpectationPopescu, ExpectationReimann };

LevyKind parse_levy_kind(const std::string& name);

struct LevyParams {
  int m = 2;
  double eps = 0.0;    ///< max-eigenvalue parameter
  double delta = 0.0;  ///< entropy deficit 1 - eta
  double w = 0.0;      ///< expectation target
  double w_operator_norm = 1.0;
  double w_spread = 2.0;  ///< lambda_max(W) - lambda_min(W)
};

/// Exponents implied by earlier concentration-of-measure bounds.
double levy_comparison_rate(LevyKind kind, const LevyParams& params);

}  // namespace atypia
