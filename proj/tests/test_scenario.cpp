#include "rotorsim/error.hpp"
#include "rotorsim/montecarlo.hpp"
#include "rotorsim/scenario.hpp"

#include <doctest.h>

#include <string>

using namespace rotorsim;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal document takes defaults") {
  const ScenarioConfig c = parse_scenario(R"({"schema_version": 1})");
  CHECK(c.duration == 10.0);
  CHECK(c.control_rate_hz == 500.0);
  CHECK(c.aero_enabled);
  CHECK(std::holds_alternative<HoverSpec>(c.trajectory));
  CHECK(std::holds_alternative<ConstantWind>(c.wind));
  CHECK_FALSE(c.estimator.enabled);
}

TEST_CASE("schema version is required and checked") {
  CHECK(error_of("{}").find("schema_version") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 7})").find("schema_version") != std::string::npos);
}

TEST_CASE("unknown fields are rejected with their line") {
  const std::string text = "{\n  \"schema_version\": 1,\n  \"wind\": {\"type\": \"constant\",\n    \"gusty\": 1}\n}";
  const std::string e = error_of(text);
  CHECK(e.find("line 4") != std::string::npos);
  CHECK(e.find("wind.gusty") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "durration": 3})").find("durration") != std::string::npos);
}

TEST_CASE("bad types and values are rejected") {
  CHECK(error_of(R"({"schema_version": 1, "duration": "long"})").find("duration") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "duration": -1})").find("duration") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "vehicle": {"mass": 0}})").find("mass") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "wind": {"type": "hurricane"}})").find("wind") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "vehicle": {"inertia": [1, 2]}})").find("inertia") != std::string::npos);
  CHECK(error_of("{\n\"schema_version\": 1,,\n}").find("line 2") != std::string::npos);
}

TEST_CASE("echo round trip preserves the configuration") {
  const std::string text = R"({
    "schema_version": 1, "name": "rt", "seed": 42, "duration": 3,
    "vehicle": {"preset": "crazyflie", "k_d": 1e-6},
    "trajectory": {"type": "circle", "radius": 1.0, "speed": 1.5},
    "wind": {"type": "dryden", "mean": [1, 2, 0], "intensity": "moderate", "seed": 9},
    "estimator": {"enabled": true, "drag": [1e-3, 1e-3, 2e-3], "use_true_thrust": true},
    "integrator": {"rtol": 1e-7}
  })";
  const ScenarioConfig a = parse_scenario(text);
  const ScenarioConfig b = parse_scenario(scenario_to_json(a).dump());
  CHECK(scenario_to_json(a) == scenario_to_json(b));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(a.vehicle.k_d == 1e-6);
  CHECK(a.estimator.tuning.use_true_thrust);
  CHECK(a.integrator.rtol == 1e-7);

  ScenarioConfig c = a;
  c.seed = 43;
  CHECK(config_hash(c) != config_hash(a));
}

TEST_CASE("field lines are located") {
  const std::string text = "{\n  \"a\": 1,\n  \"b\": {\n    \"c\": 2\n  }\n}";
  CHECK(locate_field_line(text, "b.c") == 4);
  CHECK(locate_field_line(text, "a") == 2);
  CHECK(locate_field_line(text, "zz") == -1);
}

TEST_CASE("montecarlo block parses and validates") {
  const std::string text = R"({
    "schema_version": 1, "duration": 5,
    "montecarlo": {"trials": 8, "seed": 3, "ranges": {"mass": [0.5, 0.6], "wind_speed": [1, 2]}}
  })";
  const MonteCarloSpec s = parse_montecarlo(text);
  CHECK(s.trials == 8);
  CHECK(s.seed == 3);
  CHECK(s.mass.lo == 0.5);
  CHECK(s.wind_speed.hi == 2.0);
  CHECK(s.base.duration == 5.0);
  CHECK_THROWS_AS(parse_montecarlo(R"({"schema_version": 1, "montecarlo": {"trails": 8}})"), ConfigError);
  CHECK_THROWS_AS(parse_montecarlo(R"({"schema_version": 1, "montecarlo": {"ranges": {"mass": [1, 0.5]}}})"),
                  ConfigError);
}
