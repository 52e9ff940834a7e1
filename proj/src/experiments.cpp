#include "atypia/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "atypia/errors.hpp"
#include "atypia/log.hpp"
#include "atypia/weights.hpp"

namespace atypia {

namespace {

constexpr int kChunkBits = 24;

/// Runs `body(stream, count, partial)` over all chunks and returns the
/// partials in chunk order.
template <class Partial, class Body>
std::vector<Partial> run_chunks(std::uint64_t N, std::uint64_t seed, std::uint64_t stream_index,
                                const RunOptions& opts, Body body) {
  if (opts.chunk_size == 0) throw ValidationError("chunk size must be positive");
  if (opts.workers < 1) throw ValidationError("worker count must be positive");
  const std::uint64_t chunks = (N + opts.chunk_size - 1) / opts.chunk_size;
  if (chunks >= (std::uint64_t{1} << kChunkBits)) throw ValidationError("too many samples for one stream");
  std::vector<Partial> parts(chunks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      const std::uint64_t count = std::min(opts.chunk_size, N - c * opts.chunk_size);
      SeededStream stream(seed, (stream_index << kChunkBits) | c);
      body(stream, count, parts[c]);
    }
  };
  const int k = static_cast<int>(std::min<std::uint64_t>(opts.workers, std::max<std::uint64_t>(chunks, 1)));
  if (k <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < k; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return parts;
}

void require_increasing(const std::vector<int>& n_list, std::size_t min_size) {
  if (n_list.size() < min_size) {
    throw ValidationError("n list needs at least " + std::to_string(min_size) + " entries");
  }
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw ValidationError("n values must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw ValidationError("n list must be strictly increasing");
  }
}

EstimatePoint naive_point(int n, std::uint64_t hits, std::uint64_t N, std::uint64_t seed) {
  EstimatePoint pt;
  pt.n = n;
  pt.N = N;
  pt.seed = seed;
  pt.method = Method::Naive;
  pt.p_hat = double(hits) / double(N);
  pt.std_error = std::sqrt(pt.p_hat * (1.0 - pt.p_hat) / double(N));
  pt.log_p = hits ? std::log(pt.p_hat) : -kInfinity;
  pt.ess = double(N);
  if (hits == 0) pt.upper_bound = 3.0 / double(N);
  return pt;
}

}  // namespace

Method parse_method(const std::string& text) {
  if (text == "naive") return Method::Naive;
  if (text == "tilted") return Method::Tilted;
  throw ValidationError("unknown method '" + text + "' (expected naive or tilted)");
}

const char* to_string(Method method) { return method == Method::Naive ? "naive" : "tilted"; }

FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& weights) {
  if (x.size() != y.size() || x.size() != weights.size()) throw ValidationError("fit_line: size mismatch");
  if (x.size() < 2) throw NumericalError("fit_line: need at least two points");
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights[i];
    S += w;
    Sx += w * x[i];
    Sy += w * y[i];
    Sxx += w * x[i] * x[i];
    Sxy += w * x[i] * y[i];
  }
  const double det = S * Sxx - Sx * Sx;
  if (!(det > 0.0)) throw NumericalError("fit_line: degenerate abscissae");
  FitResult fit;
  fit.slope = (S * Sxy - Sx * Sy) / det;
  fit.intercept = (Sy - fit.slope * Sx) / S;
  fit.slope_stderr = std::sqrt(S / det);
  return fit;
}

FitResult fit_exponent(const std::vector<EstimatePoint>& points, double theory_rate) {
  std::vector<double> x, y, w;
  std::vector<int> used, excluded;
  for (const auto& pt : points) {
    if (!(pt.p_hat > 0.0)) {
      excluded.push_back(pt.n);
      continue;
    }
    const double rel = std::max(pt.std_error / pt.p_hat, 1e-12);
    x.push_back(pt.n);
    y.push_back(-pt.log_p);
    w.push_back(1.0 / (rel * rel));
    used.push_back(pt.n);
  }
  if (used.size() < 4) {
    throw NumericalError("fit_exponent: fewer than four nonzero estimates (" + std::to_string(used.size()) + ")");
  }
  FitResult fit = fit_line(x, y, w);
  fit.used = used;
  fit.excluded = excluded;
  fit.theory_rate = theory_rate;
  fit.relative_gap = std::abs(fit.slope - theory_rate) / theory_rate;
  return fit;
}

TiltPlan plan_tilt(const ConstraintSet& omega, const SolverConfig& cfg) {
  TiltPlan plan;
  plan.rate = min_rel_entropy(omega, cfg);
  if (!plan.rate.minimizer || !std::isfinite(plan.rate.rate)) {
    log().warn("no usable rate-minimizer (status {}); falling back to naive sampling",
               to_string(plan.rate.diagnostics.status));
    return plan;
  }
  if (plan.rate.diagnostics.status == SolveStatus::NotConverged) {
    log().warn("tilting toward an unconverged minimizer; the estimate stays unbiased but may be noisy");
  }
  plan.orientation_averaged = omega.unitarily_invariant() && omega.dim() == 2;
  plan.mixture.emplace(std::vector<TiltedProposal>{make_tilted_proposal(*plan.rate.minimizer)},
                       std::vector<double>{1.0});
  return plan;
}

EstimatePoint estimate_probability(const ConstraintSet& omega, int n, std::uint64_t N, Method method,
                                   std::uint64_t seed, std::uint64_t stream_index, const RunOptions& opts,
                                   const TiltPlan* plan) {
  if (n < 1) throw ValidationError("estimate_probability: n must be positive");
  if (N < 100) throw ValidationError("estimate_probability: at least 100 samples are required");
  const int m = omega.dim();

  TiltPlan local;
  if (method == Method::Tilted && plan == nullptr) {
    local = plan_tilt(omega, opts.solver);
    plan = &local;
  }
  if (method == Method::Naive || !plan->mixture) {
    struct Count {
      std::uint64_t hits = 0;
    };
    auto parts = run_chunks<Count>(N, seed, stream_index, opts, [&](SeededStream& s, std::uint64_t count, Count& out) {
      for (std::uint64_t i = 0; i < count; ++i) {
        if (omega.contains(sample_induced_state(m, n, s))) ++out.hits;
      }
    });
    std::uint64_t hits = 0;
    for (const auto& p : parts) hits += p.hits;
    return naive_point(n, hits, N, seed);
  }

  const ProposalMixture& mix = *plan->mixture;
  const bool averaged = plan->orientation_averaged;
  auto parts = run_chunks<WeightSums>(N, seed, stream_index, opts, [&](SeededStream& s, std::uint64_t count, WeightSums& out) {
    for (std::uint64_t i = 0; i < count; ++i) {
      const DensityMatrix rho = mix.sample(n, s);
      if (omega.contains(rho)) out.add(mix.log_weight(rho, n, averaged));
    }
  });
  WeightSums total;
  for (const auto& p : parts) total.merge(p);

  EstimatePoint pt;
  pt.n = n;
  pt.N = N;
  pt.seed = seed;
  pt.method = Method::Tilted;
  pt.ess = total.ess();
  if (total.hits == 0) {
    pt.p_hat = 0.0;
    pt.log_p = -kInfinity;
    return pt;
  }
  const double logN = std::log(double(N));
  pt.log_p = total.w.value() - logN;
  pt.p_hat = std::exp(pt.log_p);
  // Var(w 1) / p^2 = E[w^2 1] / p^2 - 1, all in logs.
  const double rel_var = std::max(0.0, std::expm1(total.w2.value() - logN - 2.0 * pt.log_p));
  pt.std_error = pt.p_hat * std::sqrt(rel_var / double(N));
  return pt;
}

SweepResult sweep_exponent(const ConstraintSet& omega, const std::vector<int>& n_list, std::uint64_t N,
                           Method method, std::uint64_t seed, const RunOptions& opts) {
  require_increasing(n_list, 4);
  const TiltPlan plan = plan_tilt(omega, opts.solver);
  SweepResult out;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    out.points.push_back(estimate_probability(omega, n_list[i], N, method, seed, i, opts, &plan));
    log().info("n={} p_hat={:.6g} stderr={:.3g}", n_list[i], out.points.back().p_hat, out.points.back().std_error);
  }
  out.fit = fit_exponent(out.points, plan.rate.exponent());
  return out;
}

ConcentrationResult conditional_concentration(const ConstraintSet& omega, const std::vector<int>& n_list,
                                              double eps, std::uint64_t N, std::uint64_t seed,
                                              const RunOptions& opts) {
  require_increasing(n_list, 1);
  if (!(eps > 0.0)) throw ValidationError("conditional_concentration: eps must be positive");
  if (N < 100) throw ValidationError("conditional_concentration: at least 100 samples are required");
  const int m = omega.dim();
  const RateResult rate = min_rel_entropy(omega, opts.solver);
  if (!rate.minimizer) throw ValidationError("conditional_concentration: the set has no finite-rate minimizer");
  const DensityMatrix& star = *rate.minimizer;
  const Spectrum star_spec = star.spectrum();
  const bool invariant = omega.unitarily_invariant();

  // Proposal: tilt toward the minimizer and toward the point eps further out
  // along the ray from pi, so both sides of the eps-ball are sampled.
  const DensityMatrix pi = DensityMatrix::maximally_mixed(m);
  const double d0 = trace_distance(star, pi);
  std::vector<TiltedProposal> comps;
  std::vector<double> probs;
  if (d0 < 1e-12) {
    comps.push_back(make_tilted_proposal(pi));
    probs.push_back(1.0);
  } else {
    double s_max = kInfinity;
    for (int k = 0; k < m; ++k) {
      const double dev = star_spec[k] - 1.0 / m;
      if (dev < 0.0) s_max = std::min(s_max, (1.0 / m) / -dev);
    }
    for (double s : {1.0, 1.0 + eps / d0}) {
      s = std::min(s, s_max);
      const Eigen::MatrixXcd sigma = pi.matrix() + s * (star.matrix() - pi.matrix());
      comps.push_back(make_tilted_proposal(DensityMatrix::trusted(sigma)));
      probs.push_back(0.5);
    }
  }
  const ProposalMixture mix(std::move(comps), probs);
  const bool averaged = invariant && m == 2;

  struct Part {
    WeightSums in;
    WeightSums out;
  };
  ConcentrationResult res;
  res.distance = invariant ? "spectral" : "trace";
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const int n = n_list[i];
    auto parts = run_chunks<Part>(N, seed, i, opts, [&](SeededStream& s, std::uint64_t count, Part& part) {
      for (std::uint64_t j = 0; j < count; ++j) {
        const DensityMatrix rho = mix.sample(n, s);
        if (!omega.contains(rho)) continue;
        const double lw = mix.log_weight(rho, n, averaged);
        part.in.add(lw);
        const double dist = invariant ? spectral_distance(rho.spectrum(), star_spec) : trace_distance(rho, star);
        if (dist > eps) part.out.add(lw);
      }
    });
    Part total;
    for (const auto& p : parts) {
      total.in.merge(p.in);
      total.out.merge(p.out);
    }
    ConcentrationRow row;
    row.n = n;
    row.N = N;
    row.in_omega = total.in.hits;
    row.ess = total.in.ess();
    if (total.in.hits == 0) {
      row.mass_outside = std::numeric_limits<double>::quiet_NaN();
      row.std_error = std::numeric_limits<double>::quiet_NaN();
      row.log_mass = std::numeric_limits<double>::quiet_NaN();
      log().warn("n={}: no samples landed in the set", n);
    } else {
      const double s1 = total.in.w.value();
      row.log_mass = total.out.w.value() - s1;
      row.mass_outside = std::exp(row.log_mass);
      // Delta-method variance of a self-normalized ratio.
      const double r = row.mass_outside;
      const double a = std::exp(total.out.w2.value() - 2.0 * s1);
      const double b = std::exp(total.in.w2.value() - 2.0 * s1);
      row.std_error = std::sqrt(std::max(0.0, (1.0 - 2.0 * r) * a + r * r * b));
    }
    if (!res.rows.empty()) row.ratio = row.mass_outside / res.rows.back().mass_outside;
    res.rows.push_back(row);
  }

  res.strictly_decreasing = res.rows.size() > 1;
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    if (!(res.rows[i].mass_outside < res.rows[i - 1].mass_outside)) res.strictly_decreasing = false;
  }
  std::vector<double> x, y, w;
  std::vector<int> used, excluded;
  for (const auto& row : res.rows) {
    if (!(row.mass_outside > 0.0) || !(row.std_error > 0.0)) {
      excluded.push_back(row.n);
      continue;
    }
    const double rel = row.std_error / row.mass_outside;
    x.push_back(row.n);
    y.push_back(-row.log_mass);
    w.push_back(1.0 / (rel * rel));
    used.push_back(row.n);
  }
  if (used.size() >= 2) {
    res.fit = fit_line(x, y, w);
  } else {
    res.fit.slope = std::numeric_limits<double>::quiet_NaN();
    res.fit.slope_stderr = std::numeric_limits<double>::quiet_NaN();
  }
  res.fit.used = used;
  res.fit.excluded = excluded;
  return res;
}

double coherence_single_exact(int n, double kappa) {
  if (n < 1) throw ValidationError("coherence_single_exact: n must be positive");
  if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("coherence_single_exact: kappa must lie in (0,1)");
  return std::pow(1.0 - kappa, n - 1);
}

double coherence_exceedance_exact(int n, double kappa) {
  if (n < 1) throw ValidationError("coherence_exceedance_exact: n must be positive");
  if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("coherence_exceedance_exact: kappa must lie in (0,1)");
  // The squared amplitudes are flat-Dirichlet: P(p_i >= kappa for i in J) = (1 - |J| kappa)_+^{n-1}.
  long double acc = 0.0L;
  const int top = std::min(n, static_cast<int>(std::floor(1.0 / kappa)));
  for (int j = 1; j <= top; ++j) {
    const long double base = 1.0L - (long double)j * kappa;
    if (base <= 0.0L) break;
    const long double log_term = std::lgamma((long double)n + 1) - std::lgamma((long double)j + 1) -
                                 std::lgamma((long double)(n - j) + 1) + (n - 1) * std::log(base);
    const long double term = std::exp(log_term);
    acc += (j % 2 == 1) ? term : -term;
  }
  return static_cast<double>(std::clamp(acc, 0.0L, 1.0L));
}

CoherenceResult coherence_experiment(double kappa, const std::vector<int>& fit_n_list,
                                     const std::vector<int>& mc_n_list, std::uint64_t N, std::uint64_t seed,
                                     const RunOptions& opts) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("coherence_experiment: kappa must lie in (0,1)");
  require_increasing(fit_n_list, 2);
  if (!mc_n_list.empty()) require_increasing(mc_n_list, 1);
  if (!mc_n_list.empty() && N < 100) throw ValidationError("coherence_experiment: at least 100 samples are required");

  std::set<int> all(fit_n_list.begin(), fit_n_list.end());
  all.insert(mc_n_list.begin(), mc_n_list.end());
  const std::set<int> mc(mc_n_list.begin(), mc_n_list.end());

  CoherenceResult res;
  res.theory_rate = -std::log1p(-kappa);
  std::uint64_t stream_index = 0;
  for (int n : all) {
    CoherenceRow row;
    row.n = n;
    row.p_exact = coherence_exceedance_exact(n, kappa);
    row.p_lower = coherence_single_exact(n, kappa);
    row.p_upper = std::min(1.0, n * row.p_lower);
    if (mc.count(n)) {
      struct Count {
        std::uint64_t single = 0;
        std::uint64_t any = 0;
      };
      auto parts = run_chunks<Count>(N, seed, stream_index++, opts, [&](SeededStream& s, std::uint64_t count, Count& out) {
        for (std::uint64_t i = 0; i < count; ++i) {
          double total = 0.0, first = 0.0, top = 0.0;
          for (int l = 0; l < n; ++l) {
            const double a = std::norm(s.complex_normal());
            total += a;
            if (l == 0) first = a;
            top = std::max(top, a);
          }
          if (first >= kappa * total) ++out.single;
          if (top >= kappa * total) ++out.any;
        }
      });
      Count total;
      for (const auto& p : parts) {
        total.single += p.single;
        total.any += p.any;
      }
      const EstimatePoint any = naive_point(n, total.any, N, seed);
      const EstimatePoint single = naive_point(n, total.single, N, seed);
      row.N = N;
      row.p_hat = any.p_hat;
      row.std_error = any.std_error;
      row.log_p = any.log_p;
      row.p_single_hat = single.p_hat;
      row.p_single_stderr = single.std_error;
      const double slack = 3.0 * std::max(any.std_error, 1.0 / double(N));
      if (row.p_hat < row.p_lower - slack || row.p_hat > row.p_upper + slack) res.sandwich_holds = false;
    }
    res.rows.push_back(row);
  }

  std::vector<double> x, ye, yl, yu;
  for (const auto& row : res.rows) {
    if (!std::binary_search(fit_n_list.begin(), fit_n_list.end(), row.n)) continue;
    x.push_back(row.n);
    ye.push_back(-std::log(row.p_exact));
    yl.push_back(-std::log(row.p_lower));
    yu.push_back(-std::log(row.p_upper));
  }
  const std::vector<double> ones(x.size(), 1.0);
  auto finish = [&](FitResult f) {
    f.used.assign(fit_n_list.begin(), fit_n_list.end());
    f.theory_rate = res.theory_rate;
    f.relative_gap = std::abs(f.slope - res.theory_rate) / res.theory_rate;
    return f;
  };
  res.fit_exact = finish(fit_line(x, ye, ones));
  res.fit_lower = finish(fit_line(x, yl, ones));
  res.fit_upper = finish(fit_line(x, yu, ones));
  return res;
}

std::vector<CompareRow> compare_bounds_report(const std::string& kind, const CompareParams& params) {
  const bool all = kind == "all";
  if (!all && kind != "max-eig" && kind != "entropy" && kind != "expectation" && kind != "coherence") {
    throw ValidationError("unknown comparison kind '" + kind + "'");
  }
  const int m = params.m;
  if (m < 2) throw ValidationError("compare_bounds_report: m must be at least 2");
  if (params.grid.empty()) throw ValidationError("compare_bounds_report: empty parameter grid");
  std::vector<CompareRow> rows;
  auto push = [&](CompareRow r) {
    r.ratio = r.exact_exponent / r.levy_exponent;
    r.asymptotic_ratio = r.asymptotic_exponent / r.levy_exponent;
    rows.push_back(std::move(r));
  };

  if (all || kind == "max-eig") {
    for (double eps : params.grid) {
      CompareRow r{"max-eig", "eps", eps, m};
      r.exact_exponent = rate_max_eigenvalue(eps, m).exponent();
      r.asymptotic_exponent = m * (m - 1) * eps * eps / 2.0;
      r.levy_exponent = levy_comparison_rate(LevyKind::MaxEigenvalue, {m, eps});
      push(r);
      rows.back().factor = rows.back().asymptotic_ratio;
    }
  }
  if (all || kind == "entropy") {
    for (double delta : params.grid) {
      CompareRow r{"entropy", "delta", delta, m};
      r.exact_exponent = rate_entropy(1.0 - delta, m).exponent();
      r.asymptotic_exponent = m * delta * std::log(double(m));
      LevyParams lp;
      lp.m = m;
      lp.delta = delta;
      r.levy_exponent = levy_comparison_rate(LevyKind::Entropy, lp);
      push(r);
      rows.back().factor = rows.back().asymptotic_ratio * delta;
    }
  }
  if (all || kind == "expectation") {
    HermitianObservable W = params.observable ? *params.observable : [&] {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(m);
      d[0] = 1.0;
      d[m - 1] = -1.0;
      return HermitianObservable::diagonal(d);
    }();
    if (W.dim() != m) throw ValidationError("compare_bounds_report: observable dimension must equal m");
    const Eigen::VectorXd ev = W.eigenvalues();
    const double tr2 = ev.squaredNorm();
    LevyParams lp;
    lp.m = m;
    lp.w_operator_norm = ev.cwiseAbs().maxCoeff();
    lp.w_spread = ev.maxCoeff() - ev.minCoeff();
    for (double w : params.grid) {
      CompareRow r{"expectation", "w", w, m};
      r.exact_exponent = rate_expectation(w, W).exponent();
      r.asymptotic_exponent = double(m) * m * w * w / (2.0 * tr2);
      lp.w = w;
      r.levy_exponent = levy_comparison_rate(LevyKind::ExpectationReimann, lp);
      push(r);
      rows.back().factor = rows.back().asymptotic_ratio;
    }
  }
  if (all || kind == "coherence") {
    for (double omega : params.grid) {
      CompareRow r{"coherence", "omega", omega, m};
      r.exact_exponent = coherence_rate_upper(omega);
      r.asymptotic_exponent = omega;
      r.levy_exponent = coherence_rate_levy(omega);
      push(r);
    }
  }
  return rows;
}

}  // namespace atypia
