#include <doctest.h>

#include <cmath>
#include <numbers>

#include "atypia/errors.hpp"
#include "atypia/experiments.hpp"
#include "atypia/rates.hpp"
#include "atypia/sampler.hpp"
#include "oracles.hpp"

using namespace atypia;

namespace {

ConstraintSet lambda_max_at_least(double a) { return ConstraintSet::max_eigenvalue_at_least(2, a); }

double combined(const EstimatePoint& a, const EstimatePoint& b) {
  return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

bool same(const EstimatePoint& a, const EstimatePoint& b) {
  return a.n == b.n && a.p_hat == b.p_hat && a.std_error == b.std_error && a.N == b.N && a.ess == b.ess &&
         (a.log_p == b.log_p || (std::isnan(a.log_p) && std::isnan(b.log_p)));
}

}  // namespace

TEST_CASE("trivial estimates") {
  const ConstraintSet all = ConstraintSet::full_space(3);
  for (Method method : {Method::Naive, Method::Tilted}) {
    const EstimatePoint p = estimate_probability(all, 7, 1000, method, 1, 0);
    CHECK(p.p_hat == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.std_error == doctest::Approx(0.0).epsilon(1e-15));
  }
  const EstimatePoint one = estimate_probability(ConstraintSet::full_space(1), 5, 500, Method::Naive, 1, 0);
  CHECK(one.p_hat == 1.0);
  const EstimatePoint none = estimate_probability(
      ConstraintSet::linear(1, {{HermitianObservable::diagonal(Eigen::VectorXd::Ones(1)), 0.5, Relation::Equal}}), 5,
      500, Method::Naive, 1, 0);
  CHECK(none.p_hat == 0.0);
  CHECK(std::isinf(none.log_p));
  CHECK(none.upper_bound == doctest::Approx(3.0 / 500));
}

TEST_CASE("a tilted proposal integrates to one over the full space") {
  TiltPlan plan;
  plan.rate = rate_max_eigenvalue(0.5, 2);
  plan.mixture.emplace(std::vector<TiltedProposal>{make_tilted_proposal(DensityMatrix::diagonal(Eigen::Vector2d(0.7, 0.3)))},
                       std::vector<double>{1.0});
  for (bool averaged : {false, true}) {
    plan.orientation_averaged = averaged;
    const EstimatePoint p = estimate_probability(ConstraintSet::full_space(2), 6, 100000, Method::Tilted, 3, 0, {}, &plan);
    CHECK(p.std_error > 0.0);
    CHECK(std::abs(p.p_hat - 1.0) <= 3 * p.std_error);
    CHECK(p.ess <= double(p.N));
  }
}

TEST_CASE("naive and tilted agree with the exact qubit law") {
  struct Case {
    int n;
    double a;
  };
  for (Case c : {Case{5, 0.6}, Case{3, 0.9}}) {
    const double exact = oracle::qubit_lambda_max_tail(c.n, c.a);
    const EstimatePoint naive = estimate_probability(lambda_max_at_least(c.a), c.n, 1000000, Method::Naive, 5, 0);
    const EstimatePoint tilted = estimate_probability(lambda_max_at_least(c.a), c.n, 100000, Method::Tilted, 5, 1);
    CHECK(std::abs(naive.p_hat - tilted.p_hat) <= 3 * combined(naive, tilted));
    CHECK(std::abs(naive.p_hat - exact) <= 3 * naive.std_error);
    CHECK(std::abs(tilted.p_hat - exact) <= 3 * tilted.std_error);
    CHECK(naive.ess == double(naive.N));
    CHECK(tilted.ess <= double(tilted.N));
  }

  // without orientation averaging the estimate is still unbiased
  TiltPlan plan = plan_tilt(lambda_max_at_least(0.8));
  plan.orientation_averaged = false;
  const EstimatePoint plain = estimate_probability(lambda_max_at_least(0.8), 8, 100000, Method::Tilted, 6, 0, {}, &plan);
  CHECK(std::abs(plain.p_hat - oracle::qubit_lambda_max_tail(8, 0.8)) <= 3 * plain.std_error);
}

TEST_CASE("tilted estimates for a linear set in three dimensions") {
  const HermitianObservable W = HermitianObservable::diagonal(Eigen::Vector3d(1, 0, -1));
  const ConstraintSet omega = ConstraintSet::linear(3, {{W, 0.35, Relation::GreaterEqual}});
  const EstimatePoint naive = estimate_probability(omega, 6, 400000, Method::Naive, 8, 0);
  const EstimatePoint tilted = estimate_probability(omega, 6, 100000, Method::Tilted, 8, 1);
  CHECK(std::abs(naive.p_hat - tilted.p_hat) <= 3 * combined(naive, tilted));
  CHECK(tilted.std_error < naive.std_error);
}

TEST_CASE("runs are reproducible and independent of the worker count") {
  const ConstraintSet omega = lambda_max_at_least(0.75);
  RunOptions one, three;
  one.chunk_size = three.chunk_size = 1000;
  three.workers = 3;
  for (Method method : {Method::Naive, Method::Tilted}) {
    const EstimatePoint a = estimate_probability(omega, 20, 10000, method, 77, 2, one);
    const EstimatePoint b = estimate_probability(omega, 20, 10000, method, 77, 2, one);
    const EstimatePoint c = estimate_probability(omega, 20, 10000, method, 77, 2, three);
    CHECK(same(a, b));
    CHECK(same(a, c));
    const EstimatePoint d = estimate_probability(omega, 20, 10000, method, 78, 2, one);
    CHECK(!same(a, d));
  }
}

TEST_CASE("weighted line fits") {
  const FitResult f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9}, {1, 1, 1, 1});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_stderr == doctest::Approx(std::sqrt(4.0 / 20.0)));
  CHECK_THROWS_AS(fit_line({1, 1}, {1, 2}, {1, 1}), NumericalError);

  std::vector<EstimatePoint> pts;
  for (int n : {10, 20, 30, 40, 50}) {
    EstimatePoint p;
    p.n = n;
    p.p_hat = n == 30 ? 0.0 : std::exp(-0.5 * n);
    p.log_p = std::log(p.p_hat);
    p.std_error = 0.1 * p.p_hat;
    pts.push_back(p);
  }
  const FitResult e = fit_exponent(pts, 0.5);
  CHECK(e.slope == doctest::Approx(0.5));
  CHECK(e.excluded == std::vector<int>{30});
  CHECK(e.used.size() == 4);
  CHECK(e.relative_gap == doctest::Approx(0.0).epsilon(1e-10));
  pts[0].p_hat = 0.0;
  CHECK_THROWS_AS(fit_exponent(pts, 0.5), NumericalError);
}

TEST_CASE("sweeps attach the theory exponent and tighten with more samples") {
  const ConstraintSet omega = lambda_max_at_least(0.75);
  const std::vector<int> ns{10, 20, 30, 40};
  const SweepResult small = sweep_exponent(omega, ns, 1000, Method::Tilted, 9);
  const SweepResult large = sweep_exponent(omega, ns, 100000, Method::Tilted, 10);
  CHECK(large.fit.theory_rate == doctest::Approx(2 * rate_max_eigenvalue(0.5, 2).rate).epsilon(1e-9));
  CHECK(large.fit.theory_rate == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-8));
  const double ratio = small.fit.slope_stderr / large.fit.slope_stderr;
  CHECK(ratio > 5.0);
  CHECK(ratio < 20.0);
  for (std::size_t i = 1; i < large.points.size(); ++i) {
    if (large.points[i - 1].p_hat < 0.5) CHECK(-large.points[i].log_p >= -large.points[i - 1].log_p);
  }
  CHECK_THROWS_AS(sweep_exponent(omega, {10, 20, 30}, 100, Method::Naive, 1), ValidationError);
  CHECK_THROWS_AS(sweep_exponent(omega, {10, 20, 20, 30}, 100, Method::Naive, 1), ValidationError);
}

TEST_CASE("conditional concentration") {
  const ConcentrationResult trivial = conditional_concentration(ConstraintSet::full_space(2), {5, 10, 20, 40}, 1.0, 2000, 1);
  for (const auto& row : trivial.rows) CHECK(row.mass_outside == 0.0);

  const ConcentrationResult r = conditional_concentration(lambda_max_at_least(0.75), {25, 50, 100, 200}, 0.1, 5000, 2);
  CHECK(r.distance == "spectral");
  CHECK(r.strictly_decreasing);
  CHECK(r.fit.slope > 2 * r.fit.slope_stderr);
  for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].ratio < 1.0);

  const HermitianObservable W = HermitianObservable::diagonal(Eigen::Vector2d(1, -1));
  const ConcentrationResult lin =
      conditional_concentration(ConstraintSet::linear(2, {{W, 0.5, Relation::GreaterEqual}}), {25, 50, 100, 200}, 0.1, 5000, 3);
  CHECK(lin.distance == "trace");
  CHECK(lin.strictly_decreasing);
}

TEST_CASE("coherence laws") {
  CHECK(coherence_single_exact(20, 0.3) == doctest::Approx(std::pow(0.7, 19)).epsilon(1e-14));
  CHECK(coherence_exceedance_exact(2, 0.3) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(coherence_exceedance_exact(3, 0.6) == doctest::Approx(3 * 0.16).epsilon(1e-14));
  for (int n : {3, 5, 10, 40, 200}) {
    for (double k : {0.2, 0.3, 0.6}) {
      const double e = coherence_exceedance_exact(n, k);
      CHECK(e >= coherence_single_exact(n, k) * (1 - 1e-12));
      CHECK(e <= std::min(1.0, n * coherence_single_exact(n, k)) * (1 + 1e-12));
    }
  }
  // brute force
  SeededStream s(4, 0);
  const int N = 200000;
  int hits = 0;
  for (int i = 0; i < N; ++i) hits += coherence_statistic(sample_haar_pure(4, s)).p_star >= 0.4;
  const double p = coherence_exceedance_exact(4, 0.4);
  CHECK(std::abs(double(hits) / N - p) <= 3 * std::sqrt(p * (1 - p) / N));

  const CoherenceResult res = coherence_experiment(0.3, {50, 100, 200, 400}, {10, 20}, 50000, 5);
  CHECK(res.sandwich_holds);
  CHECK(res.theory_rate == doctest::Approx(std::log(1 / 0.7)).epsilon(1e-14));
  CHECK(res.fit_exact.slope == doctest::Approx(res.theory_rate).epsilon(0.05));
  CHECK(res.fit_lower.slope == doctest::Approx(res.theory_rate).epsilon(1e-12));
  CHECK(res.fit_upper.slope == doctest::Approx(res.fit_exact.slope).epsilon(1e-3));
  for (const auto& row : res.rows) {
    if (row.N == 0) continue;
    CHECK(std::abs(row.p_hat - row.p_exact) <= 3 * row.std_error + 1e-12);
    CHECK(std::abs(row.p_single_hat - row.p_lower) <= 3 * row.p_single_stderr + 1e-12);
  }
}

TEST_CASE("comparison report columns") {
  CompareParams params;
  params.m = 4;
  params.grid = {0.01, 0.1};
  const auto rows = compare_bounds_report("all", params);
  const double pi2 = std::numbers::pi * std::numbers::pi, pi3 = pi2 * std::numbers::pi;
  int seen = 0;
  for (const auto& r : rows) {
    if (r.family == "max-eig") {
      CHECK(std::abs(r.factor - 7.0 / (1 - 1.0 / 4)) <= 1e-10);
      CHECK(r.ratio == doctest::Approx(r.exact_exponent / r.levy_exponent));
      ++seen;
    } else if (r.family == "entropy") {
      CHECK(std::abs(r.factor - 8 * pi2 * std::log(4.0)) <= 1e-10 * 8 * pi2 * std::log(4.0));
      CHECK(r.asymptotic_ratio == doctest::Approx(8 * pi2 * std::log(4.0) / r.parameter).epsilon(1e-12));
      ++seen;
    } else if (r.family == "expectation") {
      // default observable diag(1, 0, 0, -1): spread 2, Tr W^2 = 2
      CHECK(std::abs(r.factor - 9 * pi3 * 4 * 4 / (4 * 2)) <= 1e-10 * 9 * pi3 * 2);
      ++seen;
    } else if (r.family == "coherence") {
      CHECK(r.exact_exponent == doctest::Approx(-std::log1p(-r.parameter)));
      ++seen;
    }
  }
  CHECK(seen == 8);
  const auto ent = compare_bounds_report("entropy", params);
  CHECK(ent.at(0).ratio > ent.at(1).ratio);
  CHECK_THROWS_AS(compare_bounds_report("nope", params), ValidationError);
}
