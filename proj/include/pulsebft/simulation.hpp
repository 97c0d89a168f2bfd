#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pulsebft/config.hpp"
#include "pulsebft/engine.hpp"
#include "pulsebft/faults.hpp"
#include "pulsebft/median_mvba.hpp"
#include "pulsebft/smr.hpp"

namespace pulsebft {

struct PulseSummary {
  std::int64_t pulse = 0;
  std::vector<Value> external_inputs;
  std::optional<std::int64_t> entry_common_state;  // honest replicas, before injection
  std::vector<Corruption> corruptions;
  std::vector<Value> agreed_input;        // per process
  std::vector<Value> agreed_state;        // per process
  std::vector<std::int64_t> next_state;   // per process
  std::vector<bool> clamped;              // per process
};

struct SimResult {
  int n = 0;
  int f = 0;
  std::vector<bool> byzantine;
  std::vector<PulseSummary> pulses;
  std::vector<Value> final_states;
  Trace trace;
};

namespace sim_detail {

inline Json value_json(Value v) {
  return v.is_bottom() ? Json(nullptr) : Json(v.payload());
}

}  // namespace sim_detail

/// Runs the full replicated state machine for the configured pulse count.
/// Everything downstream of (validated config, seed) is deterministic; the
/// returned trace serializes identically on every rerun. A handler failure
/// is recorded as a trace anomaly and surfaces as SimError.
inline SimResult run_simulation(const ValidatedConfig& vc) {
  const ScenarioConfig& cfg = vc.cfg;
  const int n = cfg.bounds.n;
  const int f = cfg.bounds.f_max;

  RoundWorld w;
  w.n = n;
  w.f_max = f;
  w.schedule.rounds_per_pulse = round_budget(n, f);
  w.rng = Rng(cfg.seed);
  w.trace.verbosity = cfg.trace_verbosity;
  w.byzantine.assign(n, false);
  for (ProcessId p : cfg.byzantine.members) w.byzantine[p - 1] = true;
  std::unique_ptr<AdversaryStrategy> strategy = make_strategy(cfg.byzantine, n, f);
  w.adversary = strategy.get();
  w.shape = [n, f](const RoundCtx& c) { return smr_shape(c.round_in_pulse, n, f); };

  SelectParams sel;
  sel.alpha = cfg.bounds.alpha;
  sel.base = cfg.threshold_base;

  Rng init_rng = w.rng.fork(0x5e1f);
  std::vector<SmrHandler*> replicas;
  for (ProcessId p = 1; p <= n; ++p) {
    ReplicaState init;
    if (cfg.self_stabilization) {
      init.current_state = Value::of(init_rng.range(-1000000, 1000000));
      init.input_value = init_rng.below(8) == 0
                             ? Value::bottom()
                             : Value::of(init_rng.range(-1000000, 1000000));
    } else {
      init.current_state = Value::of(cfg.initial_state);
      init.input_value = Value::of(cfg.initial_input);
    }
    auto h = std::make_unique<SmrHandler>(n, f, p, &cfg.machine, sel, init);
    h->attach_trace(&w.trace);
    replicas.push_back(h.get());
    w.procs.push_back(std::move(h));
  }

  SimResult result;
  result.n = n;
  result.f = f;
  result.byzantine = w.byzantine;
  result.pulses.resize(cfg.pulses);

  Rng input_rng = w.rng.fork(0x1d);
  w.input_provider = [&](std::int64_t pulse) {
    std::vector<Value> inputs(n);
    switch (cfg.inputs.kind) {
      case InputSpec::Kind::Fixed:
        for (auto& v : inputs) v = Value::of(cfg.inputs.fixed);
        break;
      case InputSpec::Kind::PerPulse:
        for (int i = 0; i < n; ++i) inputs[i] = Value::of(cfg.inputs.rows[pulse][i]);
        break;
      case InputSpec::Kind::Uniform:
        for (auto& v : inputs) v = Value::of(input_rng.range(cfg.inputs.lo, cfg.inputs.hi));
        break;
    }
    PulseSummary& ps = result.pulses[pulse];
    ps.pulse = pulse;
    ps.external_inputs = inputs;
    w.trace.add(pulse, w.schedule.abs_round(), TracePhase::Input, 0, "pulse_start");
    Json arr = Json::array();
    for (Value v : inputs) arr.push_back(sim_detail::value_json(v));
    w.trace.add(pulse, w.schedule.abs_round(), TracePhase::Input, 0, "inputs",
                {{"values", arr}});
    return inputs;
  };

  Rng fault_rng = w.rng.fork(0xfau);
  w.pulse_hook = [&](std::int64_t pulse) {
    PulseSummary& ps = result.pulses[pulse];
    // entry snapshot, before this pulse's corruption
    std::optional<std::int64_t> common;
    bool first = true, same = true;
    for (ProcessId p = 1; p <= n; ++p) {
      if (w.byzantine[p - 1]) continue;
      const Value s = replicas[p - 1]->replica().current_state;
      if (s.is_bottom()) {
        same = false;
        break;
      }
      if (first) {
        common = s.payload();
        first = false;
      } else if (common != s.payload()) {
        same = false;
        break;
      }
    }
    ps.entry_common_state = same ? common : std::nullopt;
    w.trace.add(pulse, w.schedule.abs_round(), TracePhase::Input, 0, "entry_state",
                {{"common", same && common ? Json(*common) : Json(nullptr)}});

    std::vector<ProcessId> eligible;
    for (ProcessId p = 1; p <= n; ++p)
      if (!w.byzantine[p - 1]) eligible.push_back(p);
    ps.corruptions = inject_transients(
        cfg.transients, eligible,
        [&](ProcessId p) -> ReplicaState& { return replicas[p - 1]->replica(); }, fault_rng);
    for (const Corruption& c : ps.corruptions) {
      Json data;
      data["proc"] = c.proc;
      if (c.hit_state) data["state"] = sim_detail::value_json(c.new_state);
      if (c.hit_input) data["input"] = sim_detail::value_json(c.new_input);
      w.trace.add(pulse, w.schedule.abs_round(), TracePhase::Input, c.proc, "inject",
                  std::move(data));
    }
  };

  for (std::int64_t pulse = 0; pulse < cfg.pulses; ++pulse) {
    try {
      run_rounds(w, w.schedule.rounds_per_pulse);
    } catch (const std::exception& e) {
      w.trace.add(pulse, w.schedule.abs_round(), TracePhase::Compute, 0, "anomaly",
                  {{"reason", e.what()}});
      result.trace = std::move(w.trace);
      throw SimError("run aborted in pulse " + std::to_string(pulse) + ": " + e.what());
    }
    PulseSummary& ps = result.pulses[pulse];
    ps.agreed_input.resize(n);
    ps.agreed_state.resize(n);
    ps.next_state.resize(n);
    ps.clamped.resize(n);
    for (ProcessId p = 1; p <= n; ++p) {
      ps.agreed_input[p - 1] = replicas[p - 1]->agreed_input().value_or(Value::bottom());
      ps.agreed_state[p - 1] = replicas[p - 1]->agreed_state().value_or(Value::bottom());
      ps.next_state[p - 1] = replicas[p - 1]->replica().current_state.payload();
      ps.clamped[p - 1] = replicas[p - 1]->clamped_this_pulse();
    }
  }

  for (ProcessId p = 1; p <= n; ++p)
    result.final_states.push_back(replicas[p - 1]->replica().current_state);
  result.trace = std::move(w.trace);
  return result;
}

struct ProtocolRun {
  std::vector<std::optional<Value>> decisions;   // per process
  std::vector<std::optional<bool>> bits;         // binary runs only
  std::vector<std::int64_t> decide_round;        // per process, -1 if none
  std::vector<bool> byzantine;
  Trace trace;

  std::vector<Value> honest_decisions() const {
    std::vector<Value> out;
    for (std::size_t i = 0; i < decisions.size(); ++i)
      if (!byzantine[i] && decisions[i]) out.push_back(*decisions[i]);
    return out;
  }
};

/// One median-agreement run in isolation (no replication loop around it).
inline ProtocolRun run_single_mba(int n, int f, const std::vector<Value>& inputs,
                                  const std::set<ProcessId>& byz, AdversaryStrategy* adversary,
                                  SelectParams sel, std::uint64_t seed = 0, int verbosity = 0) {
  RoundWorld w;
  w.n = n;
  w.f_max = f;
  w.schedule.rounds_per_pulse = mba_rounds(f);
  w.rng = Rng(seed);
  w.trace.verbosity = verbosity;
  w.byzantine.assign(n, false);
  for (ProcessId p : byz) w.byzantine[p - 1] = true;
  w.adversary = adversary;
  w.shape = [n, f](const RoundCtx& c) { return mba_shape(c.round_in_pulse, n, f); };
  std::vector<MbaHandler*> typed;
  for (ProcessId p = 1; p <= n; ++p) {
    auto h = std::make_unique<MbaHandler>(n, f, p, inputs[p - 1], sel);
    typed.push_back(h.get());
    w.procs.push_back(std::move(h));
  }
  run_rounds(w, mba_rounds(f));
  ProtocolRun out;
  out.byzantine = w.byzantine;
  for (MbaHandler* h : typed) {
    out.decisions.push_back(h->decision());
    out.decide_round.push_back(h->decide_round());
  }
  out.trace = std::move(w.trace);
  return out;
}

/// One weak-validity agreement run (Turpin-Coan) in isolation.
inline ProtocolRun run_single_weak(int n, int f, const std::vector<Value>& inputs,
                                   const std::set<ProcessId>& byz, AdversaryStrategy* adversary,
                                   std::uint64_t seed = 0) {
  RoundWorld w;
  w.n = n;
  w.f_max = f;
  w.schedule.rounds_per_pulse = weak_rounds(f);
  w.rng = Rng(seed);
  w.byzantine.assign(n, false);
  for (ProcessId p : byz) w.byzantine[p - 1] = true;
  w.adversary = adversary;
  w.shape = [n, f](const RoundCtx& c) { return weak_shape(c.round_in_pulse, n, f); };
  std::vector<WeakHandler*> typed;
  for (ProcessId p = 1; p <= n; ++p) {
    auto h = std::make_unique<WeakHandler>(n, f, p, inputs[p - 1]);
    typed.push_back(h.get());
    w.procs.push_back(std::move(h));
  }
  run_rounds(w, weak_rounds(f));
  ProtocolRun out;
  out.byzantine = w.byzantine;
  for (WeakHandler* h : typed) {
    out.decisions.push_back(h->decision());
    out.decide_round.push_back(h->decision() ? weak_rounds(f) - 1 : -1);
  }
  out.trace = std::move(w.trace);
  return out;
}

/// One binary phase-king run in isolation.
inline ProtocolRun run_single_binary(int n, int f, const std::vector<bool>& inputs,
                                     const std::set<ProcessId>& byz,
                                     AdversaryStrategy* adversary, std::uint64_t seed = 0) {
  RoundWorld w;
  w.n = n;
  w.f_max = f;
  w.schedule.rounds_per_pulse = phase_king_rounds(f);
  w.rng = Rng(seed);
  w.byzantine.assign(n, false);
  for (ProcessId p : byz) w.byzantine[p - 1] = true;
  w.adversary = adversary;
  w.shape = [](const RoundCtx& c) { return pk_shape(c.round_in_pulse); };
  std::vector<BinaryHandler*> typed;
  for (ProcessId p = 1; p <= n; ++p) {
    auto h = std::make_unique<BinaryHandler>(n, f, p, inputs[p - 1]);
    typed.push_back(h.get());
    w.procs.push_back(std::move(h));
  }
  run_rounds(w, phase_king_rounds(f));
  ProtocolRun out;
  out.byzantine = w.byzantine;
  for (BinaryHandler* h : typed) {
    out.bits.push_back(h->decision());
    out.decisions.push_back(h->decision() ? std::optional<Value>(Value::of(*h->decision()))
                                          : std::nullopt);
    out.decide_round.push_back(h->decision() ? phase_king_rounds(f) - 1 : -1);
  }
  out.trace = std::move(w.trace);
  return out;
}

}  // namespace pulsebft
