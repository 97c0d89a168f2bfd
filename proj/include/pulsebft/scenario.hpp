#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pulsebft/config.hpp"

namespace pulsebft {

namespace scenario_detail {

using Json = nlohmann::ordered_json;

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
}

inline std::int64_t get_int(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing \"" + key + "\" in " + where);
  if (!obj.at(key).is_number_integer())
    throw ConfigError("\"" + key + "\" in " + where + " must be an integer");
  return obj.at(key).get<std::int64_t>();
}

inline std::int64_t get_int_or(const Json& obj, const std::string& key, std::int64_t fallback,
                               const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return get_int(obj, key, where);
}

}  // namespace scenario_detail

/// Parses a scenario document. The schema is strict: unknown keys are
/// errors, so a misspelled fault bound can never silently weaken a run.
inline ScenarioConfig parse_scenario_json(const nlohmann::ordered_json& j) {
  using scenario_detail::get_int;
  using scenario_detail::get_int_or;
  using scenario_detail::reject_unknown;
  using Json = nlohmann::ordered_json;

  if (!j.is_object()) throw ConfigError("scenario document must be a JSON object");
  reject_unknown(j,
                 {"n", "f_max", "r_max", "alpha", "pulses", "seed", "byzantine", "transients",
                  "machine", "inputs", "threshold_base", "self_stabilization",
                  "trace_verbosity", "initial_state", "initial_input"},
                 "scenario");

  ScenarioConfig cfg;
  cfg.bounds.n = static_cast<int>(get_int(j, "n", "scenario"));
  cfg.bounds.f_max = static_cast<int>(
      get_int_or(j, "f_max", cfg.bounds.n >= 1 ? (cfg.bounds.n - 1) / 3 : 0, "scenario"));
  cfg.bounds.r_max = static_cast<int>(
      get_int_or(j, "r_max", std::max(0, transient_bound(cfg.bounds.n)), "scenario"));
  cfg.bounds.alpha = static_cast<int>(get_int_or(j, "alpha", 0, "scenario"));
  cfg.pulses = get_int_or(j, "pulses", 1, "scenario");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
      throw ConfigError("\"seed\" must be a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }

  if (j.contains("byzantine")) {
    const Json& b = j.at("byzantine");
    reject_unknown(b, {"kind", "members", "target", "a", "b", "index"}, "byzantine");
    const std::string kind = b.at("kind").get<std::string>();
    if (kind == "none") {
      cfg.byzantine.kind = ByzantineStrategyCfg::Kind::None;
    } else {
      if (kind == "silent")
        cfg.byzantine.kind = ByzantineStrategyCfg::Kind::Silent;
      else if (kind == "random")
        cfg.byzantine.kind = ByzantineStrategyCfg::Kind::Random;
      else if (kind == "equivocate_split")
        cfg.byzantine.kind = ByzantineStrategyCfg::Kind::EquivocateSplit;
      else if (kind == "collude")
        cfg.byzantine.kind = ByzantineStrategyCfg::Kind::Collude;
      else if (kind == "exhaustive")
        cfg.byzantine.kind = ByzantineStrategyCfg::Kind::Exhaustive;
      else
        throw ConfigError("unknown byzantine kind \"" + kind + "\"");
      if (!b.contains("members") || !b.at("members").is_array())
        throw ConfigError("byzantine strategy needs a \"members\" array");
      for (const auto& m : b.at("members"))
        cfg.byzantine.members.insert(m.get<int>());
      if (cfg.byzantine.kind == ByzantineStrategyCfg::Kind::Collude)
        cfg.byzantine.target = b.contains("target") && b.at("target").is_null()
                                   ? Value::bottom()
                                   : Value::of(get_int(b, "target", "byzantine"));
      if (cfg.byzantine.kind == ByzantineStrategyCfg::Kind::EquivocateSplit) {
        cfg.byzantine.split_a = Value::of(get_int(b, "a", "byzantine"));
        cfg.byzantine.split_b = Value::of(get_int(b, "b", "byzantine"));
      }
      if (cfg.byzantine.kind == ByzantineStrategyCfg::Kind::Exhaustive)
        cfg.byzantine.strategy_index =
            static_cast<std::uint64_t>(get_int_or(b, "index", 0, "byzantine"));
    }
  }

  if (j.contains("transients")) {
    const Json& t = j.at("transients");
    reject_unknown(t, {"kind", "target", "z", "x", "fields"}, "transients");
    const std::string kind = t.at("kind").get<std::string>();
    if (kind == "none") {
      cfg.transients.kind = TransientModelCfg::Kind::None;
    } else {
      if (kind == "malicious") {
        cfg.transients.kind = TransientModelCfg::Kind::Malicious;
        cfg.transients.target = t.contains("target") && t.at("target").is_null()
                                    ? Value::bottom()
                                    : Value::of(get_int(t, "target", "transients"));
      } else if (kind == "uniform") {
        cfg.transients.kind = TransientModelCfg::Kind::Uniform;
        cfg.transients.domain =
            static_cast<std::uint64_t>(get_int_or(t, "z", 1 << 16, "transients"));
      } else {
        throw ConfigError("unknown transient kind \"" + kind + "\"");
      }
      cfg.transients.per_pulse = static_cast<int>(get_int(t, "x", "transients"));
      const std::string fields =
          t.contains("fields") ? t.at("fields").get<std::string>() : "state";
      if (fields == "state")
        cfg.transients.fields = TransientModelCfg::Fields::State;
      else if (fields == "input")
        cfg.transients.fields = TransientModelCfg::Fields::Input;
      else if (fields == "both")
        cfg.transients.fields = TransientModelCfg::Fields::Both;
      else
        throw ConfigError("unknown transients fields \"" + fields + "\"");
    }
  }

  if (!j.contains("machine")) throw ConfigError("missing \"machine\" in scenario");
  {
    const Json& m = j.at("machine");
    reject_unknown(m, {"kind", "m", "states", "alphabet", "table"}, "machine");
    const std::string kind = m.at("kind").get<std::string>();
    if (kind == "counter") {
      cfg.machine = StateMachineSpec::counter(get_int(m, "m", "machine"));
    } else if (kind == "register") {
      cfg.machine = StateMachineSpec::reg();
    } else if (kind == "price_oracle") {
      cfg.machine = StateMachineSpec::price_oracle();
    } else if (kind == "table") {
      cfg.machine.kind = StateMachineSpec::Kind::Table;
      cfg.machine.state_count = get_int(m, "states", "machine");
      if (!m.contains("alphabet") || !m.at("alphabet").is_array())
        throw ConfigError("table machine needs an \"alphabet\" array");
      for (const auto& a : m.at("alphabet"))
        cfg.machine.alphabet.push_back(a.get<std::int64_t>());
      if (!m.contains("table") || !m.at("table").is_array())
        throw ConfigError("table machine needs a \"table\" array");
      for (const auto& row : m.at("table")) {
        if (!row.is_array() || row.size() != 3)
          throw ConfigError("table rows must be [state, input, next]");
        cfg.machine.table[{row[0].get<std::int64_t>(), row[1].get<std::int64_t>()}] =
            row[2].get<std::int64_t>();
      }
    } else {
      throw ConfigError("unknown machine kind \"" + kind + "\"");
    }
  }

  if (j.contains("inputs")) {
    const Json& in = j.at("inputs");
    reject_unknown(in, {"kind", "value", "rows", "lo", "hi"}, "inputs");
    const std::string kind = in.at("kind").get<std::string>();
    if (kind == "fixed") {
      cfg.inputs.kind = InputSpec::Kind::Fixed;
      cfg.inputs.fixed = get_int(in, "value", "inputs");
    } else if (kind == "per_pulse") {
      cfg.inputs.kind = InputSpec::Kind::PerPulse;
      if (!in.contains("rows") || !in.at("rows").is_array())
        throw ConfigError("per_pulse inputs need a \"rows\" array");
      for (const auto& row : in.at("rows")) {
        std::vector<std::int64_t> r;
        for (const auto& v : row) r.push_back(v.get<std::int64_t>());
        cfg.inputs.rows.push_back(std::move(r));
      }
    } else if (kind == "uniform") {
      cfg.inputs.kind = InputSpec::Kind::Uniform;
      cfg.inputs.lo = get_int(in, "lo", "inputs");
      cfg.inputs.hi = get_int(in, "hi", "inputs");
    } else {
      throw ConfigError("unknown inputs kind \"" + kind + "\"");
    }
  }

  if (j.contains("threshold_base")) {
    const std::string base = j.at("threshold_base").get<std::string>();
    if (base == "k")
      cfg.threshold_base = ThresholdBase::K;
    else if (base == "n")
      cfg.threshold_base = ThresholdBase::N;
    else
      throw ConfigError("threshold_base must be \"k\" or \"n\"");
  }
  if (j.contains("self_stabilization"))
    cfg.self_stabilization = j.at("self_stabilization").get<bool>();
  cfg.trace_verbosity = static_cast<int>(get_int_or(j, "trace_verbosity", 0, "scenario"));
  cfg.initial_state = get_int_or(j, "initial_state", 0, "scenario");
  cfg.initial_input = get_int_or(j, "initial_input", 0, "scenario");
  return cfg;
}

/// Canonical serialization: every field materialized, fixed order. Feeding
/// the output back through the parser is the identity.
inline nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg) {
  using Json = nlohmann::ordered_json;
  Json j;
  j["n"] = cfg.bounds.n;
  j["f_max"] = cfg.bounds.f_max;
  j["r_max"] = cfg.bounds.r_max;
  j["alpha"] = cfg.bounds.alpha;
  j["pulses"] = cfg.pulses;
  j["seed"] = cfg.seed;

  Json b;
  switch (cfg.byzantine.kind) {
    case ByzantineStrategyCfg::Kind::None: b["kind"] = "none"; break;
    case ByzantineStrategyCfg::Kind::Silent: b["kind"] = "silent"; break;
    case ByzantineStrategyCfg::Kind::Random: b["kind"] = "random"; break;
    case ByzantineStrategyCfg::Kind::EquivocateSplit: b["kind"] = "equivocate_split"; break;
    case ByzantineStrategyCfg::Kind::Collude: b["kind"] = "collude"; break;
    case ByzantineStrategyCfg::Kind::Exhaustive: b["kind"] = "exhaustive"; break;
  }
  if (cfg.byzantine.kind != ByzantineStrategyCfg::Kind::None) {
    b["members"] = Json::array();
    for (ProcessId p : cfg.byzantine.members) b["members"].push_back(p);
    if (cfg.byzantine.kind == ByzantineStrategyCfg::Kind::Collude)
      b["target"] =
          cfg.byzantine.target.is_bottom() ? Json(nullptr) : Json(cfg.byzantine.target.payload());
    if (cfg.byzantine.kind == ByzantineStrategyCfg::Kind::EquivocateSplit) {
      b["a"] = cfg.byzantine.split_a.payload();
      b["b"] = cfg.byzantine.split_b.payload();
    }
    if (cfg.byzantine.kind == ByzantineStrategyCfg::Kind::Exhaustive)
      b["index"] = cfg.byzantine.strategy_index;
  }
  j["byzantine"] = std::move(b);

  Json t;
  switch (cfg.transients.kind) {
    case TransientModelCfg::Kind::None: t["kind"] = "none"; break;
    case TransientModelCfg::Kind::Malicious: t["kind"] = "malicious"; break;
    case TransientModelCfg::Kind::Uniform: t["kind"] = "uniform"; break;
  }
  if (cfg.transients.kind != TransientModelCfg::Kind::None) {
    if (cfg.transients.kind == TransientModelCfg::Kind::Malicious)
      t["target"] = cfg.transients.target.is_bottom() ? Json(nullptr)
                                                      : Json(cfg.transients.target.payload());
    else
      t["z"] = cfg.transients.domain;
    t["x"] = cfg.transients.per_pulse;
    t["fields"] = cfg.transients.fields == TransientModelCfg::Fields::State   ? "state"
                  : cfg.transients.fields == TransientModelCfg::Fields::Input ? "input"
                                                                              : "both";
  }
  j["transients"] = std::move(t);

  Json m;
  switch (cfg.machine.kind) {
    case StateMachineSpec::Kind::Counter:
      m["kind"] = "counter";
      m["m"] = cfg.machine.state_count;
      break;
    case StateMachineSpec::Kind::Register: m["kind"] = "register"; break;
    case StateMachineSpec::Kind::PriceOracle: m["kind"] = "price_oracle"; break;
    case StateMachineSpec::Kind::Table: {
      m["kind"] = "table";
      m["states"] = cfg.machine.state_count;
      m["alphabet"] = cfg.machine.alphabet;
      Json rows = Json::array();
      for (const auto& [key, next] : cfg.machine.table)
        rows.push_back(Json::array({key.first, key.second, next}));
      m["table"] = std::move(rows);
      break;
    }
  }
  j["machine"] = std::move(m);

  Json in;
  switch (cfg.inputs.kind) {
    case InputSpec::Kind::Fixed:
      in["kind"] = "fixed";
      in["value"] = cfg.inputs.fixed;
      break;
    case InputSpec::Kind::PerPulse:
      in["kind"] = "per_pulse";
      in["rows"] = cfg.inputs.rows;
      break;
    case InputSpec::Kind::Uniform:
      in["kind"] = "uniform";
      in["lo"] = cfg.inputs.lo;
      in["hi"] = cfg.inputs.hi;
      break;
  }
  j["inputs"] = std::move(in);

  j["threshold_base"] = cfg.threshold_base == ThresholdBase::K ? "k" : "n";
  j["self_stabilization"] = cfg.self_stabilization;
  j["trace_verbosity"] = cfg.trace_verbosity;
  j["initial_state"] = cfg.initial_state;
  j["initial_input"] = cfg.initial_input;
  return j;
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return parse_scenario_json(j);
}

/// Reads, parses and validates a scenario file.
inline ValidatedConfig parse_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return validate_config(parse_scenario_text(ss.str()));
}

}  // namespace pulsebft
