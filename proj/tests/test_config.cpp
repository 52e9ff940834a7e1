#include <doctest.h>

#include <json.hpp>

#include "atypia/config.hpp"
#include "atypia/errors.hpp"

using namespace atypia;
using nlohmann::json;

namespace {

void check_round_trip(const json& j) {
  const ConstraintSet a = constraint_set_from_json(j);
  const json once = to_json(a);
  const ConstraintSet b = constraint_set_from_json(once);
  CHECK(to_json(b) == once);
  CHECK(b.dim() == a.dim());
  CHECK(b.kind() == a.kind());
}

}  // namespace

TEST_CASE("constraint sets survive a JSON round trip") {
  check_round_trip(json::parse(R"({"m":3,"linear":[{"W":{"diag":[1,0,-1]},"w":0.5,"rel":"="}]})"));
  check_round_trip(json::parse(R"({"m":4,"linear":[{"W":{"projector_rank_k":2},"w":0.2,"rel":"<="},
                                                   {"W":{"diag":[1,1,-1,-1]},"w":0.1,"rel":">="}]})"));
  check_round_trip(json::parse(R"({"m":2,"linear":[{"W":[[[0,0],[0,-1]],[[0,1],[0,0]]],"w":0.3,"rel":">="}]})"));
  check_round_trip(json::parse(R"({"m":2,"spectral":{"fn":"lambda_max","target":0.75,"rel":">="}})"));
  check_round_trip(json::parse(R"({"m":5,"spectral":[{"fn":"entropy","target":1.0,"rel":"<="},
                                                     {"fn":"trace_distance","target":0.1,"rel":">="}]})"));
  check_round_trip(json::parse(R"({"m":2,"bloch":[{"shape":"halfspace","normal":[0,0,1],"offset":0.3,"rel":">="},
                                                  {"shape":"ball","center":[0.1,0.2,0],"radius":0.5,"rel":"<="}]})"));
  for (const ConstraintSet& s : {ConstraintSet::full_space(3), ConstraintSet::equal_to_pi(2),
                                 ConstraintSet::max_eigenvalue_at_least(4, 0.6)}) {
    const json j = to_json(s);
    CHECK(to_json(constraint_set_from_json(j)) == j);
  }
}

TEST_CASE("observables from JSON") {
  const HermitianObservable d = observable_from_json(json::parse(R"({"diag":[2,-1,-1]})"), 3);
  CHECK(d.matrix()(0, 0).real() == 2.0);
  const HermitianObservable p = observable_from_json(json::parse(R"({"projector_rank_k":1})"), 3);
  CHECK(p.trace() == doctest::Approx(1.0));
  const HermitianObservable r = observable_from_json(json::parse("[[1,0],[0,-1]]"), 2);
  CHECK(r.matrix()(1, 1).real() == -1.0);
  CHECK_THROWS_AS(observable_from_json(json::parse(R"({"projector_rank_k":1})"), std::nullopt), ValidationError);
  CHECK_THROWS_AS(observable_from_json(json::parse("[[1,1],[0,-1]]"), 2), ValidationError);
  CHECK_THROWS_AS(observable_from_json(json::parse(R"({"diag":[1,2]})"), 3), ValidationError);
}

TEST_CASE("schema violations are rejected") {
  const char* bad[] = {
      R"({"m":2,"spectral":[]})",
      R"({"m":2})",
      R"({"m":2,"spectral":[{"fn":"lambda_max","target":0.7,"rel":">"}]})",
      R"({"m":2,"spectral":[{"fn":"lambda_max","target":0.7,"rel":">=","extra":1}]})",
      R"({"m":2,"spectral":[{"fn":"lambda_min","target":0.7,"rel":">="}]})",
      R"({"m":3,"bloch":[{"shape":"ball","center":[0,0,0],"radius":0.5,"rel":">="}]})",
      R"({"m":2,"linear":[],"spectral":[{"fn":"lambda_max","target":0.7,"rel":">="}]})",
      R"({"m":0,"spectral":[{"fn":"lambda_max","target":0.7,"rel":">="}]})",
      R"({"m":"two","spectral":[{"fn":"lambda_max","target":0.7,"rel":">="}]})",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(constraint_set_from_json(json::parse(text)), ValidationError);
  }
}

TEST_CASE("run configs") {
  const RunConfig cfg = run_config_from_json(json::parse(R"({
    "m": 2, "spectral": [{"fn": "lambda_max", "target": 0.75, "rel": ">="}],
    "n_list": [20, 40, 60, 80], "samples": 1000, "method": "naive", "seed": 12, "workers": 2,
    "out": "x.csv", "format": "json", "solver": {"max_iters": 50, "restarts": 1}})"));
  CHECK(cfg.m == 2);
  CHECK(cfg.constraints->dim() == 2);
  CHECK(cfg.n_list == std::vector<int>{20, 40, 60, 80});
  CHECK(*cfg.samples == 1000u);
  CHECK(cfg.method == Method::Naive);
  CHECK(*cfg.seed == 12u);
  CHECK(cfg.workers == 2);
  CHECK(cfg.format == "json");
  CHECK(cfg.solver.max_iters == 50);
  CHECK(to_json(run_config_from_json(to_json(cfg))) == to_json(cfg));

  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"seeed": 1})")), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"seed": -1})")), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"format": "xml"})")), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"method": "magic"})")), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"solver": {"speed": 3}})")), ValidationError);
}
