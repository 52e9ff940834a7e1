#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atypia/constraints.hpp"
#include "atypia/rates.hpp"
#include "atypia/sampler.hpp"
#include "atypia/solver.hpp"

namespace atypia {

enum class Method { Naive, Tilted };

Method parse_method(const std::string& text);
const char* to_string(Method method);

/// Samples are drawn in fixed-size chunks, chunk c of stream s using
/// SeededStream(seed, (s << 24) | c). Per-chunk partial sums are reduced in
/// chunk order, so results do not depend on the worker count.
struct RunOptions {
  int workers = 1;
  std::uint64_t chunk_size = 4096;
  SolverConfig solver;
};

struct EstimatePoint {
  int n = 0;
  double p_hat = 0.0;
  double std_error = 0.0;
  double log_p = 0.0;  ///< -inf when nothing was observed
  std::uint64_t N = 0;
  Method method = Method::Naive;
  double ess = 0.0;
  std::uint64_t seed = 0;
  /// One-sided 95% bound 3/N when p_hat = 0, otherwise NaN.
  double upper_bound = std::numeric_limits<double>::quiet_NaN();
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::vector<int> used;
  std::vector<int> excluded;  ///< n values dropped for zero estimates
  double theory_rate = std::numeric_limits<double>::quiet_NaN();
  double relative_gap = std::numeric_limits<double>::quiet_NaN();
};

/// Weighted least squares y ~ slope x + intercept; slope_stderr assumes the
/// weights are inverse variances.
FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& weights);

/// Fit of -log_p against n with delta-method weights (p_hat / stderr)^2.
FitResult fit_exponent(const std::vector<EstimatePoint>& points, double theory_rate);

/// Proposal built around the rate-minimizer of a set.
struct TiltPlan {
  RateResult rate;
  std::optional<ProposalMixture> mixture;  ///< empty: sample naively
  bool orientation_averaged = false;
};

/// Tilts toward the solver's minimizer; orientation averaging is used for
/// qubit spectral sets. Leaves `mixture` empty (with a warning) if the
/// minimizer cannot be found.
TiltPlan plan_tilt(const ConstraintSet& omega, const SolverConfig& cfg = {});

EstimatePoint estimate_probability(const ConstraintSet& omega, int n, std::uint64_t N, Method method,
                                   std::uint64_t seed, std::uint64_t stream_index, const RunOptions& opts = {},
                                   const TiltPlan* plan = nullptr);

struct SweepResult {
  std::vector<EstimatePoint> points;
  FitResult fit;
};

/// Requires at least four strictly increasing n values; the fit needs four
/// nonzero estimates. theory_rate = m * (solver infimum).
SweepResult sweep_exponent(const ConstraintSet& omega, const std::vector<int>& n_list, std::uint64_t N,
                           Method method, std::uint64_t seed, const RunOptions& opts = {});

struct ConcentrationRow {
  int n = 0;
  std::uint64_t N = 0;
  std::uint64_t in_omega = 0;
  double mass_outside = 0.0;  ///< self-normalized weight beyond distance eps
  double std_error = 0.0;
  double log_mass = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();  ///< mass(n) / mass(previous n)
  double ess = 0.0;
};

struct ConcentrationResult {
  std::vector<ConcentrationRow> rows;
  FitResult fit;  ///< decay slope of -log mass_outside against n
  bool strictly_decreasing = false;
  std::string distance;  ///< "spectral" for unitarily invariant sets, else "trace"
};

/// Mass of Omega beyond distance eps from its minimizer, conditioned on Omega.
/// For unitarily invariant sets the minimizer is only defined up to rotation,
/// so the distance is to the orbit (sorted-spectrum trace distance).
ConcentrationResult conditional_concentration(const ConstraintSet& omega, const std::vector<int>& n_list,
                                              double eps, std::uint64_t N, std::uint64_t seed,
                                              const RunOptions& opts = {});

/// Pr{|<e_1|psi>|^2 >= kappa} for Haar psi in C^n: (1 - kappa)^{n-1}.
double coherence_single_exact(int n, double kappa);
/// Pr{max_l |<e_l|psi>|^2 >= kappa} by inclusion-exclusion over coordinates.
double coherence_exceedance_exact(int n, double kappa);

struct CoherenceRow {
  int n = 0;
  std::uint64_t N = 0;  ///< 0 when no Monte Carlo was run at this n
  double p_hat = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  double log_p = std::numeric_limits<double>::quiet_NaN();
  double p_single_hat = std::numeric_limits<double>::quiet_NaN();
  double p_single_stderr = std::numeric_limits<double>::quiet_NaN();
  double p_exact = 0.0;
  double p_lower = 0.0;  ///< single-coordinate law
  double p_upper = 0.0;  ///< n times the single-coordinate law
};

struct CoherenceResult {
  std::vector<CoherenceRow> rows;
  FitResult fit_exact;
  FitResult fit_lower;
  FitResult fit_upper;
  double theory_rate = 0.0;
  bool sandwich_holds = true;
};

/// Exact laws on `fit_n_list`, Monte Carlo on `mc_n_list`.
CoherenceResult coherence_experiment(double kappa, const std::vector<int>& fit_n_list,
                                     const std::vector<int>& mc_n_list, std::uint64_t N, std::uint64_t seed,
                                     const RunOptions& opts = {});

struct CompareRow {
  std::string family;
  std::string parameter_name;
  double parameter = 0.0;
  int m = 0;
  double exact_exponent = 0.0;       ///< m * exact infimum
  double asymptotic_exponent = 0.0;  ///< leading small-parameter term
  double levy_exponent = 0.0;
  double ratio = 0.0;                ///< exact / levy
  double asymptotic_ratio = 0.0;     ///< asymptotic / levy
  double factor = std::numeric_limits<double>::quiet_NaN();  ///< parameter-free part of asymptotic_ratio
};

struct CompareParams {
  int m = 3;
  std::vector<double> grid{0.01, 0.02, 0.05, 0.1};
  /// Observable for the expectation family; traceless. Defaults to diag(1, 0, -1) padded.
  std::optional<HermitianObservable> observable;
};

/// kind: max-eig, entropy, expectation, coherence, or all.
std::vector<CompareRow> compare_bounds_report(const std::string& kind, const CompareParams& params);

}  // namespace atypia
