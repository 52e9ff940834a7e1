#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "atypia/constraints.hpp"
#include "atypia/experiments.hpp"
#include "atypia/solver.hpp"

namespace atypia {

/// Observable from JSON: a dense matrix (rows of [re, im] pairs or plain
/// reals), {"diag": [...]}, or {"projector_rank_k": k} (needs `dim`).
HermitianObservable observable_from_json(const nlohmann::json& j, std::optional<int> dim);
/// Dense [re, im] form.
nlohmann::json to_json(const HermitianObservable& W);

nlohmann::json to_json(const ConstraintSet& omega);
/// Reads "m" together with exactly one of "linear", "spectral", "bloch".
ConstraintSet constraint_set_from_json(const nlohmann::json& j);

/// Everything a CLI command may need. Unknown keys are rejected.
struct RunConfig {
  std::optional<int> m;
  std::optional<ConstraintSet> constraints;
  std::vector<int> n_list;
  std::vector<int> mc_n_list;
  std::optional<std::uint64_t> samples;
  Method method = Method::Tilted;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::optional<std::string> out;
  std::string format = "csv";
  std::optional<double> epsilon;
  std::optional<double> kappa;
  std::optional<std::string> kind;
  std::vector<double> grid;
  std::optional<HermitianObservable> observable;
  SolverConfig solver;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace atypia
