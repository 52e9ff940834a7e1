#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "atypia/config.hpp"
#include "atypia/errors.hpp"
#include "atypia/experiments.hpp"
#include "atypia/log.hpp"
#include "atypia/rates.hpp"
#include "atypia/solver.hpp"

namespace atypia {

namespace {

using nlohmann::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// JSON has no infinities; they become strings.
json jnum(double x) {
  if (std::isfinite(x)) return x;
  return num(x);
}

json spectrum_json(const std::optional<Spectrum>& s) {
  if (!s) return nullptr;
  json a = json::array();
  for (int k = 0; k < s->size(); ++k) a.push_back(jnum((*s)[k]));
  return a;
}

std::string spectrum_text(const std::optional<Spectrum>& s) {
  if (!s) return "none";
  std::string t = "[";
  for (int k = 0; k < s->size(); ++k) t += (k ? ", " : "") + num((*s)[k]);
  return t + "]";
}

json fit_json(const FitResult& f) {
  return {{"slope", jnum(f.slope)},
          {"intercept", jnum(f.intercept)},
          {"slope_stderr", jnum(f.slope_stderr)},
          {"used", f.used},
          {"excluded", f.excluded},
          {"theory_rate", jnum(f.theory_rate)},
          {"relative_gap", jnum(f.relative_gap)}};
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << body;
  if (!f) throw IoError("failed writing '" + path + "'");
}

/// Key-value output for rate/solve.
class Report {
 public:
  void add(const std::string& key, json value, std::string text) {
    j_[key] = std::move(value);
    lines_.push_back(key + ": " + std::move(text));
  }
  void add(const std::string& key, double v) { add(key, jnum(v), num(v)); }
  void print(std::ostream& out, const std::string& format) const {
    if (format == "json") {
      out << j_.dump(2) << "\n";
    } else {
      for (const auto& l : lines_) out << l << "\n";
    }
  }

 private:
  json j_ = json::object();
  std::vector<std::string> lines_;
};

void add_rate(Report& r, const RateResult& res) {
  r.add("rate", res.rate);
  r.add("exponent", res.exponent());
  r.add("minimizer_spectrum", spectrum_json(res.minimizer_spectrum()), spectrum_text(res.minimizer_spectrum()));
}

struct Overrides {
  std::string config;
  int m = 0;
  std::vector<int> n_list;
  std::vector<int> mc_n_list;
  std::uint64_t samples = 0;
  std::string method;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
  std::string format;
  double eps = NAN;
  double kappa = NAN;
  std::string kind;
  std::vector<double> grid;
  CLI::App* app = nullptr;
  bool given(const char* name) const {
    const CLI::Option* opt = app->get_option_no_throw(name);
    return opt && opt->count() > 0;
  }
};

void add_run_flags(CLI::App* sub, Overrides& o, bool config_required) {
  o.app = sub;
  auto* c = sub->add_option("config", o.config, "JSON run configuration");
  if (config_required) c->required();
  sub->add_option("--m", o.m, "subsystem dimension");
  sub->add_option("--n-list", o.n_list, "environment dimensions, comma separated")->delimiter(',');
  sub->add_option("--samples", o.samples, "samples per point");
  sub->add_option("--method", o.method, "naive or tilted");
  sub->add_option("--seed", o.seed, "RNG seed (required)");
  sub->add_option("--workers", o.workers, "worker threads");
  sub->add_option("--out", o.out, "output path");
  sub->add_option("--format", o.format, "csv or json");
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : run_config_from_json(load_json(o.config));
  if (o.given("--m")) {
    if (o.m < 1) throw ValidationError("--m must be positive");
    if (cfg.constraints && cfg.constraints->dim() != o.m) {
      throw ValidationError("--m conflicts with the dimension of the configured constraints");
    }
    cfg.m = o.m;
  }
  if (o.given("--n-list")) cfg.n_list = o.n_list;
  if (o.given("--mc-n-list")) cfg.mc_n_list = o.mc_n_list;
  if (o.given("--samples")) cfg.samples = o.samples;
  if (o.given("--method")) cfg.method = parse_method(o.method);
  if (o.given("--seed")) cfg.seed = o.seed;
  if (o.given("--workers")) {
    if (o.workers < 1) throw ValidationError("--workers must be positive");
    cfg.workers = o.workers;
  }
  if (o.given("--out")) cfg.out = o.out;
  if (o.given("--format")) {
    if (o.format != "csv" && o.format != "json") throw ValidationError("--format must be csv or json");
    cfg.format = o.format;
  }
  if (o.given("--eps")) cfg.epsilon = o.eps;
  if (o.given("--kappa")) cfg.kappa = o.kappa;
  if (o.given("--kind")) cfg.kind = o.kind;
  if (o.given("--grid")) cfg.grid = o.grid;
  return cfg;
}

std::uint64_t need_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw ValidationError("a seed is required (config 'seed' or --seed)");
  return *cfg.seed;
}

std::uint64_t need_samples(const RunConfig& cfg) {
  if (!cfg.samples) throw ValidationError("a sample count is required (config 'samples' or --samples)");
  return *cfg.samples;
}

const ConstraintSet& need_constraints(const RunConfig& cfg) {
  if (!cfg.constraints) throw ValidationError("config has no constraint set");
  return *cfg.constraints;
}

RunOptions options(const RunConfig& cfg) {
  RunOptions opts;
  opts.workers = cfg.workers;
  opts.solver = cfg.solver;
  return opts;
}

const char* kEstimateHeader = "n,p_hat,stderr,log_p,N,method,ess,seed";

std::string estimate_row(const EstimatePoint& p) {
  return std::to_string(p.n) + "," + num(p.p_hat) + "," + num(p.std_error) + "," + num(p.log_p) + "," +
         std::to_string(p.N) + "," + to_string(p.method) + "," + num(p.ess) + "," + std::to_string(p.seed);
}

json estimate_json(const EstimatePoint& p) {
  return {{"n", p.n},           {"p_hat", jnum(p.p_hat)}, {"stderr", jnum(p.std_error)}, {"log_p", jnum(p.log_p)},
          {"N", p.N},           {"method", to_string(p.method)}, {"ess", jnum(p.ess)}, {"seed", p.seed},
          {"upper_bound", jnum(p.upper_bound)}};
}

/// Writes rows (and the optional sidecar) to --out, or rows to stdout.
void emit(const RunConfig& cfg, const std::string& csv, const json& doc, const json& sidecar, std::ostream& out,
          std::ostream& err, const std::string& summary) {
  const std::string body = cfg.format == "json" ? doc.dump(2) + "\n" : csv;
  if (cfg.out) {
    write_file(*cfg.out, body);
    if (cfg.format == "csv" && !sidecar.is_null()) write_file(*cfg.out + ".fit.json", sidecar.dump(2) + "\n");
    if (!summary.empty()) out << summary;
  } else {
    out << body;
    if (!summary.empty()) err << summary;
  }
}

int cmd_rate(const std::string& family, const std::map<std::string, double>& p, const std::vector<double>& diag,
             const std::vector<double>& coords, const std::string& format, std::ostream& out) {
  auto need = [&](const char* k) {
    auto it = p.find(k);
    if (it == p.end()) throw ValidationError(std::string("rate ") + family + " needs --" + k);
    return it->second;
  };
  auto need_m = [&] {
    const double m = need("m");
    if (m != std::floor(m) || m < 1) throw ValidationError("--m must be a positive integer");
    return static_cast<int>(m);
  };
  Report r;
  r.add("family", family, family);
  if (family == "qubit") {
    const double t = need("t");
    const double v = rate_qubit(t);
    r.add("rate", v);
    r.add("exponent", 2.0 * v);
    const std::optional<Spectrum> s = t < 1.0 ? std::optional<Spectrum>(Spectrum(Eigen::Vector2d((1 + t) / 2, (1 - t) / 2)))
                                              : std::nullopt;
    r.add("minimizer_spectrum", spectrum_json(s), spectrum_text(s));
  } else if (family == "max-eig") {
    add_rate(r, rate_max_eigenvalue(need("eps"), need_m()));
  } else if (family == "binary-meas") {
    const double m0 = need("m0");
    add_rate(r, rate_binary_measurement(need("q"), static_cast<int>(m0), need_m()));
  } else if (family == "trace-dist") {
    const RateResult res = rate_trace_distance(need("t"), need_m());
    add_rate(r, res);
    r.add("argmin_levels", res.diagnostics.argmin_index);
  } else if (family == "entropy") {
    const RateResult res = rate_entropy(need("eta"), need_m());
    add_rate(r, res);
    r.add("argmin_levels", res.diagnostics.argmin_index);
    for (const auto& w : res.diagnostics.warnings) log().warn("{}", w);
  } else if (family == "expectation") {
    if (diag.empty()) throw ValidationError("rate expectation needs --diag");
    const RateResult res = rate_expectation(need("w"), HermitianObservable::diagonal(Eigen::Map<const Eigen::VectorXd>(diag.data(), diag.size())));
    add_rate(r, res);
    r.add("nu", res.diagnostics.multiplier);
  } else if (family == "w3") {
    const double w = need("w");
    const double v = rate_w3(w);
    r.add("rate", v);
    r.add("exponent", 3.0 * v);
    r.add("nu", w == 0.0 ? 0.0 : nu_star_m3(w));
  } else if (family == "coherence") {
    const double omega = need("omega");
    r.add("upper", coherence_rate_upper(omega));
    r.add("levy", coherence_rate_levy(omega));
  } else if (family == "gaussian") {
    if (coords.empty()) throw ValidationError("rate gaussian needs --coords");
    GaussianRatePoint pt{Eigen::Map<const Eigen::VectorXd>(coords.data(), coords.size())};
    r.add("sanov_rate", gaussian_sanov_rate(pt));
    r.add("scale_min", gaussian_rate_scale_min(pt));
  } else {
    throw ValidationError("unknown rate family '" + family + "'");
  }
  r.print(out, format);
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const RateResult res = min_rel_entropy(need_constraints(cfg), cfg.solver);
  Report r;
  add_rate(r, res);
  if (res.minimizer) {
    json mat = to_json(HermitianObservable(res.minimizer->matrix()));
    r.add("minimizer", mat, mat.dump());
  }
  r.add("status", to_string(res.diagnostics.status), to_string(res.diagnostics.status));
  r.add("iterations", res.diagnostics.iterations, std::to_string(res.diagnostics.iterations));
  r.add("constraint_residual", res.diagnostics.constraint_residual);
  r.add("stationarity", res.diagnostics.stationarity);
  r.print(out, cfg.format == "json" ? "json" : "text");
  switch (res.diagnostics.status) {
    case SolveStatus::Infeasible: return kExitInfeasible;
    case SolveStatus::NotConverged: return kExitNotConverged;
    default: return kExitOk;
  }
}

int cmd_estimate(const RunConfig& cfg, bool fit, std::ostream& out, std::ostream& err) {
  const ConstraintSet& omega = need_constraints(cfg);
  const std::uint64_t seed = need_seed(cfg);
  const std::uint64_t N = need_samples(cfg);
  if (cfg.n_list.empty()) throw ValidationError("n_list is required");
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] < 1 || (i && cfg.n_list[i] <= cfg.n_list[i - 1])) {
      throw ValidationError("n_list must be positive and strictly increasing");
    }
  }
  if (fit && cfg.n_list.size() < 4) throw ValidationError("sweep needs at least four n values");
  const RunOptions opts = options(cfg);
  const TiltPlan plan = plan_tilt(omega, cfg.solver);
  std::vector<EstimatePoint> pts;
  std::string csv = std::string(kEstimateHeader) + "\n";
  json rows = json::array();
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    pts.push_back(estimate_probability(omega, cfg.n_list[i], N, cfg.method, seed, i, opts, &plan));
    csv += estimate_row(pts.back()) + "\n";
    rows.push_back(estimate_json(pts.back()));
  }
  json doc = {{"points", rows}};
  json sidecar;
  std::string summary;
  if (fit) {
    json fj;
    try {
      const FitResult f = fit_exponent(pts, plan.rate.exponent());
      fj = fit_json(f);
      summary = "slope " + num(f.slope) + " +/- " + num(f.slope_stderr) + ", theory " + num(f.theory_rate) +
                ", relative gap " + num(f.relative_gap) + "\n";
    } catch (const NumericalError& e) {
      fj = {{"error", e.what()}, {"theory_rate", jnum(plan.rate.exponent())}};
      summary = std::string("no fit: ") + e.what() + "\n";
    }
    doc["fit"] = fj;
    sidecar = {{"command", "sweep"}, {"fit", fj}, {"workers", cfg.workers}, {"seed", seed}, {"samples", N},
               {"config", to_json(cfg)}};
  }
  emit(cfg, csv, doc, sidecar, out, err, summary);
  return kExitOk;
}

int cmd_concentration(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ConstraintSet& omega = need_constraints(cfg);
  const std::uint64_t seed = need_seed(cfg);
  const std::uint64_t N = need_samples(cfg);
  if (!cfg.epsilon) throw ValidationError("concentration needs epsilon (config or --eps)");
  const ConcentrationResult res = conditional_concentration(omega, cfg.n_list, *cfg.epsilon, N, seed, options(cfg));
  std::string csv = "n,in_omega,mass_outside,stderr,log_mass,ratio,N,ess,seed\n";
  json rows = json::array();
  for (const auto& r : res.rows) {
    csv += std::to_string(r.n) + "," + std::to_string(r.in_omega) + "," + num(r.mass_outside) + "," + num(r.std_error) +
           "," + num(r.log_mass) + "," + num(r.ratio) + "," + std::to_string(r.N) + "," + num(r.ess) + "," +
           std::to_string(seed) + "\n";
    rows.push_back({{"n", r.n}, {"in_omega", r.in_omega}, {"mass_outside", jnum(r.mass_outside)},
                    {"stderr", jnum(r.std_error)}, {"log_mass", jnum(r.log_mass)}, {"ratio", jnum(r.ratio)},
                    {"N", r.N}, {"ess", jnum(r.ess)}, {"seed", seed}});
  }
  const json fj = fit_json(res.fit);
  json doc = {{"rows", rows}, {"fit", fj}, {"strictly_decreasing", res.strictly_decreasing}, {"distance", res.distance}};
  json sidecar = {{"command", "concentration"}, {"fit", fj}, {"strictly_decreasing", res.strictly_decreasing},
                  {"distance", res.distance}, {"workers", cfg.workers}, {"seed", seed}, {"config", to_json(cfg)}};
  const std::string summary = "decay slope " + num(res.fit.slope) + " +/- " + num(res.fit.slope_stderr) +
                              (res.strictly_decreasing ? ", strictly decreasing\n" : ", not strictly decreasing\n");
  emit(cfg, csv, doc, sidecar, out, err, summary);
  return kExitOk;
}

int cmd_coherence(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.kappa) throw ValidationError("coherence needs kappa (config or --kappa)");
  const std::uint64_t seed = need_seed(cfg);
  const std::uint64_t N = cfg.mc_n_list.empty() ? 0 : need_samples(cfg);
  const CoherenceResult res = coherence_experiment(*cfg.kappa, cfg.n_list, cfg.mc_n_list, N, seed, options(cfg));
  std::string csv = std::string(kEstimateHeader) + ",p_exact,p_lower,p_upper,p_single_hat,p_single_stderr\n";
  json rows = json::array();
  for (const auto& r : res.rows) {
    const bool mc = r.N > 0;
    csv += std::to_string(r.n) + "," + num(r.p_hat) + "," + num(r.std_error) + "," + num(r.log_p) + "," +
           std::to_string(r.N) + "," + (mc ? "naive" : "exact") + "," + num(mc ? double(r.N) : NAN) + "," +
           std::to_string(seed) + "," + num(r.p_exact) + "," + num(r.p_lower) + "," + num(r.p_upper) + "," +
           num(r.p_single_hat) + "," + num(r.p_single_stderr) + "\n";
    rows.push_back({{"n", r.n}, {"p_hat", jnum(r.p_hat)}, {"stderr", jnum(r.std_error)}, {"log_p", jnum(r.log_p)},
                    {"N", r.N}, {"p_exact", jnum(r.p_exact)}, {"p_lower", jnum(r.p_lower)},
                    {"p_upper", jnum(r.p_upper)}, {"p_single_hat", jnum(r.p_single_hat)},
                    {"p_single_stderr", jnum(r.p_single_stderr)}});
  }
  const json fits = {{"exact", fit_json(res.fit_exact)}, {"lower", fit_json(res.fit_lower)}, {"upper", fit_json(res.fit_upper)}};
  json doc = {{"rows", rows}, {"fit", fits}, {"theory_rate", res.theory_rate}, {"sandwich_holds", res.sandwich_holds}};
  json sidecar = {{"command", "coherence"}, {"fit", fits}, {"theory_rate", res.theory_rate},
                  {"sandwich_holds", res.sandwich_holds}, {"workers", cfg.workers}, {"seed", seed}, {"config", to_json(cfg)}};
  const std::string summary = "exact-law slope " + num(res.fit_exact.slope) + ", theory " + num(res.theory_rate) +
                              (res.sandwich_holds ? ", sandwich holds\n" : ", sandwich violated\n");
  emit(cfg, csv, doc, sidecar, out, err, summary);
  return kExitOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  CompareParams params;
  if (cfg.m) params.m = *cfg.m;
  if (!cfg.grid.empty()) params.grid = cfg.grid;
  params.observable = cfg.observable;
  const auto rows = compare_bounds_report(cfg.kind.value_or("all"), params);
  std::string csv = "family,parameter_name,parameter,m,exact_exponent,asymptotic_exponent,levy_exponent,ratio,asymptotic_ratio,factor\n";
  json jr = json::array();
  for (const auto& r : rows) {
    csv += r.family + "," + r.parameter_name + "," + num(r.parameter) + "," + std::to_string(r.m) + "," +
           num(r.exact_exponent) + "," + num(r.asymptotic_exponent) + "," + num(r.levy_exponent) + "," + num(r.ratio) +
           "," + num(r.asymptotic_ratio) + "," + num(r.factor) + "\n";
    jr.push_back({{"family", r.family}, {"parameter_name", r.parameter_name}, {"parameter", r.parameter}, {"m", r.m},
                  {"exact_exponent", jnum(r.exact_exponent)}, {"asymptotic_exponent", jnum(r.asymptotic_exponent)},
                  {"levy_exponent", jnum(r.levy_exponent)}, {"ratio", jnum(r.ratio)},
                  {"asymptotic_ratio", jnum(r.asymptotic_ratio)}, {"factor", jnum(r.factor)}});
  }
  emit(cfg, csv, json{{"rows", jr}}, json(), out, err, "");
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Large-deviation rates for induced random states, with rare-event Monte Carlo checks", "atypia"};
  app.require_subcommand(1);

  auto* rate = app.add_subcommand("rate", "closed-form rate for a named family");
  std::string family;
  std::map<std::string, double> params;
  std::vector<double> diag, coords;
  std::string rate_format = "text";
  rate->add_option("family", family, "qubit, max-eig, binary-meas, trace-dist, entropy, expectation, w3, coherence, gaussian")
      ->required();
  for (const char* k : {"m", "eps", "t", "q", "m0", "eta", "w", "omega"}) {
    rate->add_option_function<double>(std::string("--") + k, [&params, k](const double& v) { params[k] = v; });
  }
  rate->add_option("--diag", diag, "eigenvalues of a diagonal observable")->delimiter(',');
  rate->add_option("--coords", coords, "operator-basis coordinates t (length m^2)")->delimiter(',');
  rate->add_option("--format", rate_format, "text or json");

  auto* solve = app.add_subcommand("solve", "numerical infimum over a configured set");
  Overrides solve_o;
  add_run_flags(solve, solve_o, true);

  Overrides est_o, sweep_o, conc_o, coh_o, cmp_o;
  auto* estimate = app.add_subcommand("estimate", "probability estimates at each n");
  add_run_flags(estimate, est_o, true);
  auto* sweep = app.add_subcommand("sweep", "estimates plus exponent fit");
  add_run_flags(sweep, sweep_o, true);
  auto* conc = app.add_subcommand("concentration", "conditional mass outside an eps-ball of the minimizer");
  add_run_flags(conc, conc_o, true);
  conc->add_option("--eps", conc_o.eps, "ball radius (trace distance)");
  auto* coh = app.add_subcommand("coherence", "overlap exceedance laws and exponent fits");
  add_run_flags(coh, coh_o, false);
  coh->add_option("--kappa", coh_o.kappa, "overlap threshold");
  coh->add_option("--mc-n-list", coh_o.mc_n_list, "n values with Monte Carlo")->delimiter(',');
  auto* cmp = app.add_subcommand("compare", "exact exponents against earlier concentration bounds");
  add_run_flags(cmp, cmp_o, false);
  cmp->add_option("--kind", cmp_o.kind, "max-eig, entropy, expectation, coherence or all");
  cmp->add_option("--grid", cmp_o.grid, "parameter values")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (rate->parsed()) {
      if (rate_format != "text" && rate_format != "json") throw ValidationError("--format must be text or json");
      return cmd_rate(family, params, diag, coords, rate_format, out);
    }
    if (solve->parsed()) return cmd_solve(resolve(solve_o), out);
    if (estimate->parsed()) return cmd_estimate(resolve(est_o), false, out, err);
    if (sweep->parsed()) return cmd_estimate(resolve(sweep_o), true, out, err);
    if (conc->parsed()) return cmd_concentration(resolve(conc_o), out, err);
    if (coh->parsed()) return cmd_coherence(resolve(coh_o), out, err);
    if (cmp->parsed()) return cmd_compare(resolve(cmp_o), out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNotConverged;
  }
  return kExitConfig;
}

}  // namespace atypia
