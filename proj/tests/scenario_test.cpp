#include <gtest/gtest.h>

#include "pulsebft/scenario.hpp"

namespace pulsebft {
namespace {

TEST(Scenario, MinimalDocumentGetsDefaults) {
  const ScenarioConfig cfg =
      parse_scenario_text(R"({"n": 4, "pulses": 1, "machine": {"kind": "counter", "m": 10}})");
  EXPECT_EQ(cfg.bounds.n, 4);
  EXPECT_EQ(cfg.bounds.f_max, 1);  // floor((n-1)/3)
  EXPECT_EQ(cfg.bounds.alpha, 0);
  EXPECT_EQ(cfg.seed, 0u);
  EXPECT_EQ(cfg.byzantine.kind, ByzantineStrategyCfg::Kind::None);
  EXPECT_EQ(cfg.transients.kind, TransientModelCfg::Kind::None);
  EXPECT_EQ(cfg.threshold_base, ThresholdBase::K);
  EXPECT_FALSE(cfg.self_stabilization);
  EXPECT_TRUE(validate_config(cfg).warnings.empty());
}

TEST(Scenario, SerializeParseFixpoint) {
  const std::string full = R"({
    "n": 12, "f_max": 3, "r_max": 1, "alpha": 1,
    "pulses": 20, "seed": 7,
    "byzantine": {"kind": "collude", "members": [10, 11, 12], "target": 0},
    "transients": {"kind": "malicious", "target": 0, "x": 1, "fields": "state"},
    "machine": {"kind": "counter", "m": 1000},
    "inputs": {"kind": "uniform", "lo": 0, "hi": 100},
    "threshold_base": "k",
    "self_stabilization": false,
    "initial_state": 5
  })";
  const ScenarioConfig once = parse_scenario_text(full);
  const std::string canon = scenario_to_json(once).dump();
  const ScenarioConfig twice = parse_scenario_text(canon);
  EXPECT_EQ(scenario_to_json(twice).dump(), canon);
}

TEST(Scenario, FixpointAcrossAllBlockKinds) {
  const std::vector<std::string> docs = {
      R"({"n":4,"machine":{"kind":"register"},"byzantine":{"kind":"silent","members":[1]}})",
      R"({"n":4,"machine":{"kind":"price_oracle"},"byzantine":{"kind":"random","members":[2]}})",
      R"({"n":4,"machine":{"kind":"counter","m":5},
          "byzantine":{"kind":"equivocate_split","members":[3],"a":1,"b":9}})",
      R"({"n":4,"machine":{"kind":"counter","m":5},
          "byzantine":{"kind":"exhaustive","members":[4],"index":12}})",
      R"({"n":4,"machine":{"kind":"table","states":2,"alphabet":[0,1],
          "table":[[0,0,0],[0,1,1],[1,0,1],[1,1,0]]},
          "transients":{"kind":"uniform","z":16,"x":1,"fields":"both"},
          "inputs":{"kind":"per_pulse","rows":[[0,1,0,1]]}})",
  };
  for (const std::string& doc : docs) {
    const ScenarioConfig once = parse_scenario_text(doc);
    const std::string canon = scenario_to_json(once).dump();
    EXPECT_EQ(scenario_to_json(parse_scenario_text(canon)).dump(), canon) << doc;
  }
}

TEST(Scenario, BelowMinimumIsRejectedThroughValidation) {
  const ScenarioConfig cfg =
      parse_scenario_text(R"({"n": 3, "machine": {"kind": "counter", "m": 10}})");
  try {
    validate_config(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("n below minimum"), std::string::npos);
  }
}

TEST(Scenario, UnknownKeysAreNamed) {
  try {
    parse_scenario_text(R"({"n": 4, "machine": {"kind": "register"}, "fmax": 1})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fmax"), std::string::npos);
  }
  EXPECT_THROW(
      parse_scenario_text(
          R"({"n": 4, "machine": {"kind": "register", "bogus": 1}})"),
      ConfigError);
}

TEST(Scenario, MalformedDocumentsNameTheProblem) {
  EXPECT_THROW(parse_scenario_text("{"), ConfigError);
  EXPECT_THROW(parse_scenario_text(R"({"machine": {"kind": "register"}})"), ConfigError);
  EXPECT_THROW(parse_scenario_text(R"({"n": 4})"), ConfigError);  // machine required
  EXPECT_THROW(parse_scenario_text(R"({"n": "four", "machine": {"kind": "register"}})"),
               ConfigError);
  EXPECT_THROW(
      parse_scenario_text(
          R"({"n": 4, "machine": {"kind": "register"}, "threshold_base": "q"})"),
      ConfigError);
  EXPECT_THROW(
      parse_scenario_text(
          R"({"n": 4, "machine": {"kind": "register"},
              "byzantine": {"kind": "collude", "members": [1]}})"),
      ConfigError);  // collude without target
}

}  // namespace
}  // namespace pulsebft
