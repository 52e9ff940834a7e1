#include "atypia/config.hpp"

#include <set>

#include "atypia/errors.hpp"

namespace atypia {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ValidationError(where + ": unknown key '" + it.key() + "'");
  }
}

const json& required(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ValidationError(what + " must be a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ValidationError(what + " must be an integer");
  return j.get<std::int64_t>();
}

std::string text(const json& j, const std::string& what) {
  if (!j.is_string()) throw ValidationError(what + " must be a string");
  return j.get<std::string>();
}

std::vector<int> int_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + " must be an array");
  std::vector<int> out;
  for (const auto& v : j) out.push_back(static_cast<int>(integer(v, what + " entry")));
  return out;
}

Eigen::Vector3d vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ValidationError(what + " must be an array of three numbers");
  return {number(j[0], what), number(j[1], what), number(j[2], what)};
}

json vec3_json(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

std::vector<json> as_list(const json& j, const std::string& what) {
  if (j.is_object()) return {j};
  if (!j.is_array()) throw ValidationError(what + " must be an object or an array of objects");
  return std::vector<json>(j.begin(), j.end());
}

}  // namespace

HermitianObservable observable_from_json(const json& j, std::optional<int> dim) {
  if (j.is_object()) {
    if (j.contains("diag")) {
      reject_unknown(j, {"diag"}, "observable");
      const json& d = j.at("diag");
      if (!d.is_array() || d.empty()) throw ValidationError("observable diag must be a nonempty array");
      Eigen::VectorXd v(d.size());
      for (std::size_t k = 0; k < d.size(); ++k) v[k] = number(d[k], "diag entry");
      if (dim && v.size() != *dim) throw ValidationError("observable diag length must equal m");
      return HermitianObservable::diagonal(v);
    }
    if (j.contains("projector_rank_k")) {
      reject_unknown(j, {"projector_rank_k"}, "observable");
      if (!dim) throw ValidationError("projector_rank_k needs the dimension m");
      return HermitianObservable::projector(*dim, static_cast<int>(integer(j.at("projector_rank_k"), "projector_rank_k")));
    }
    throw ValidationError("observable object must have 'diag' or 'projector_rank_k'");
  }
  if (!j.is_array() || j.empty()) throw ValidationError("observable must be a matrix, diag or projector shorthand");
  const std::size_t n = j.size();
  Eigen::MatrixXcd M(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != n) throw ValidationError("observable matrix must be square");
    for (std::size_t c = 0; c < n; ++c) {
      const json& e = j[r][c];
      if (e.is_number()) {
        M(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        M(r, c) = {number(e[0], "matrix entry"), number(e[1], "matrix entry")};
      } else {
        throw ValidationError("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return HermitianObservable(M);
}

json to_json(const HermitianObservable& W) {
  json rows = json::array();
  for (int r = 0; r < W.dim(); ++r) {
    json row = json::array();
    for (int c = 0; c < W.dim(); ++c) row.push_back(json::array({W.matrix()(r, c).real(), W.matrix()(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const ConstraintSet& omega) {
  json j;
  j["m"] = omega.dim();
  switch (omega.kind()) {
    case ConstraintSet::Kind::Linear: {
      json list = json::array();
      for (const auto& c : omega.linear_constraints()) {
        list.push_back({{"W", to_json(c.observable)}, {"w", c.target}, {"rel", to_string(c.rel)}});
      }
      j["linear"] = list;
      break;
    }
    case ConstraintSet::Kind::Spectral: {
      json list = json::array();
      for (const auto& c : omega.spectral_constraints()) {
        list.push_back({{"fn", to_string(c.fn)}, {"target", c.target}, {"rel", to_string(c.rel)}});
      }
      j["spectral"] = list;
      break;
    }
    case ConstraintSet::Kind::Bloch: {
      json list = json::array();
      for (const auto& r : omega.bloch_regions()) {
        if (r.shape == BlochRegion::Shape::HalfSpace) {
          list.push_back({{"shape", "halfspace"}, {"normal", vec3_json(r.vec)}, {"offset", r.scalar}, {"rel", to_string(r.rel)}});
        } else {
          list.push_back({{"shape", "ball"}, {"center", vec3_json(r.vec)}, {"radius", r.scalar}, {"rel", to_string(r.rel)}});
        }
      }
      j["bloch"] = list;
      break;
    }
  }
  return j;
}

namespace {

ConstraintSet constraints_from(const json& j, int m) {
  const int kinds = int(j.contains("linear")) + int(j.contains("spectral")) + int(j.contains("bloch"));
  if (kinds == 0) throw ValidationError("config: no constraints given (linear, spectral or bloch)");
  if (kinds > 1) throw ValidationError("config: use exactly one of linear, spectral, bloch");
  if (j.contains("linear")) {
    std::vector<LinearConstraint> cs;
    for (const json& e : as_list(j.at("linear"), "linear")) {
      reject_unknown(e, {"W", "w", "rel"}, "linear constraint");
      cs.push_back({observable_from_json(required(e, "W", "linear constraint"), m),
                    number(required(e, "w", "linear constraint"), "w"),
                    parse_relation(text(required(e, "rel", "linear constraint"), "rel"))});
    }
    return ConstraintSet::linear(m, std::move(cs));
  }
  if (j.contains("spectral")) {
    std::vector<SpectralConstraint> cs;
    for (const json& e : as_list(j.at("spectral"), "spectral")) {
      reject_unknown(e, {"fn", "target", "rel"}, "spectral constraint");
      cs.push_back({parse_spectral_function(text(required(e, "fn", "spectral constraint"), "fn")),
                    number(required(e, "target", "spectral constraint"), "target"),
                    parse_relation(text(required(e, "rel", "spectral constraint"), "rel"))});
    }
    return ConstraintSet::spectral(m, std::move(cs));
  }
  if (m != 2) throw ValidationError("bloch regions require m = 2");
  std::vector<BlochRegion> rs;
  for (const json& e : as_list(j.at("bloch"), "bloch")) {
    const std::string shape = text(required(e, "shape", "bloch region"), "shape");
    const Relation rel = parse_relation(text(required(e, "rel", "bloch region"), "rel"));
    if (shape == "halfspace") {
      reject_unknown(e, {"shape", "normal", "offset", "rel"}, "bloch halfspace");
      rs.push_back({BlochRegion::Shape::HalfSpace, vec3(required(e, "normal", "bloch halfspace"), "normal"),
                    number(required(e, "offset", "bloch halfspace"), "offset"), rel});
    } else if (shape == "ball") {
      reject_unknown(e, {"shape", "center", "radius", "rel"}, "bloch ball");
      rs.push_back({BlochRegion::Shape::Ball, vec3(required(e, "center", "bloch ball"), "center"),
                    number(required(e, "radius", "bloch ball"), "radius"), rel});
    } else {
      throw ValidationError("bloch region shape must be 'halfspace' or 'ball'");
    }
  }
  return ConstraintSet::bloch(std::move(rs));
}

}  // namespace

ConstraintSet constraint_set_from_json(const json& j) {
  try {
    reject_unknown(j, {"m", "linear", "spectral", "bloch"}, "constraint set");
    const std::int64_t m = integer(required(j, "m", "constraint set"), "m");
    if (m < 1) throw ValidationError("m must be positive");
    return constraints_from(j, static_cast<int>(m));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("constraint set: ") + e.what());
  }
}

RunConfig run_config_from_json(const json& j) {
  try {
    reject_unknown(j,
                   {"m", "linear", "spectral", "bloch", "n_list", "mc_n_list", "samples", "method", "seed", "workers",
                    "out", "format", "epsilon", "kappa", "kind", "grid", "observable", "solver"},
                   "config");
    RunConfig cfg;
    if (j.contains("m")) {
      const std::int64_t m = integer(j.at("m"), "m");
      if (m < 1) throw ValidationError("m must be positive");
      cfg.m = static_cast<int>(m);
    }
    if (j.contains("linear") || j.contains("spectral") || j.contains("bloch")) {
      if (!cfg.m) throw ValidationError("config: constraints need 'm'");
      cfg.constraints = constraints_from(j, *cfg.m);
    }
    if (j.contains("n_list")) cfg.n_list = int_list(j.at("n_list"), "n_list");
    if (j.contains("mc_n_list")) cfg.mc_n_list = int_list(j.at("mc_n_list"), "mc_n_list");
    if (j.contains("samples")) {
      const std::int64_t s = integer(j.at("samples"), "samples");
      if (s < 1) throw ValidationError("samples must be positive");
      cfg.samples = static_cast<std::uint64_t>(s);
    }
    if (j.contains("method")) cfg.method = parse_method(text(j.at("method"), "method"));
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<std::int64_t>() >= 0)) {
        throw ValidationError("seed must be a nonnegative integer");
      }
      cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("workers")) {
      cfg.workers = static_cast<int>(integer(j.at("workers"), "workers"));
      if (cfg.workers < 1) throw ValidationError("workers must be positive");
    }
    if (j.contains("out")) cfg.out = text(j.at("out"), "out");
    if (j.contains("format")) {
      cfg.format = text(j.at("format"), "format");
      if (cfg.format != "csv" && cfg.format != "json") throw ValidationError("format must be csv or json");
    }
    if (j.contains("epsilon")) cfg.epsilon = number(j.at("epsilon"), "epsilon");
    if (j.contains("kappa")) cfg.kappa = number(j.at("kappa"), "kappa");
    if (j.contains("kind")) cfg.kind = text(j.at("kind"), "kind");
    if (j.contains("grid")) {
      if (!j.at("grid").is_array()) throw ValidationError("grid must be an array");
      for (const auto& v : j.at("grid")) cfg.grid.push_back(number(v, "grid entry"));
    }
    if (j.contains("observable")) cfg.observable = observable_from_json(j.at("observable"), cfg.m);
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      reject_unknown(s, {"max_iters", "gradient_tol", "feasibility_tol", "restarts", "seed"}, "solver");
      if (s.contains("max_iters")) cfg.solver.max_iters = static_cast<int>(integer(s.at("max_iters"), "max_iters"));
      if (s.contains("gradient_tol")) cfg.solver.gradient_tol = number(s.at("gradient_tol"), "gradient_tol");
      if (s.contains("feasibility_tol")) cfg.solver.feasibility_tol = number(s.at("feasibility_tol"), "feasibility_tol");
      if (s.contains("restarts")) cfg.solver.restarts = static_cast<int>(integer(s.at("restarts"), "restarts"));
      if (s.contains("seed")) cfg.solver.seed = s.at("seed").get<std::uint64_t>();
      if (cfg.solver.max_iters < 1 || !(cfg.solver.gradient_tol > 0) || !(cfg.solver.feasibility_tol > 0) ||
          cfg.solver.restarts < 0) {
        throw ValidationError("solver settings must be positive");
      }
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

json to_json(const RunConfig& cfg) {
  json j = cfg.constraints ? to_json(*cfg.constraints) : json::object();
  if (cfg.m) j["m"] = *cfg.m;
  if (!cfg.n_list.empty()) j["n_list"] = cfg.n_list;
  if (!cfg.mc_n_list.empty()) j["mc_n_list"] = cfg.mc_n_list;
  if (cfg.samples) j["samples"] = *cfg.samples;
  j["method"] = to_string(cfg.method);
  if (cfg.seed) j["seed"] = *cfg.seed;
  j["workers"] = cfg.workers;
  if (cfg.out) j["out"] = *cfg.out;
  j["format"] = cfg.format;
  if (cfg.epsilon) j["epsilon"] = *cfg.epsilon;
  if (cfg.kappa) j["kappa"] = *cfg.kappa;
  if (cfg.kind) j["kind"] = *cfg.kind;
  if (!cfg.grid.empty()) j["grid"] = cfg.grid;
  if (cfg.observable) j["observable"] = to_json(*cfg.observable);
  j["solver"] = {{"max_iters", cfg.solver.max_iters},
                 {"gradient_tol", cfg.solver.gradient_tol},
                 {"feasibility_tol", cfg.solver.feasibility_tol},
                 {"restarts", cfg.solver.restarts},
                 {"seed", cfg.solver.seed}};
  return j;
}

}  // namespace atypia
