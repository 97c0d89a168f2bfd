#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pulsebft/config.hpp"
#include "pulsebft/simulation.hpp"

namespace pulsebft {

struct Violation {
  std::string property;
  std::uint64_t seed = 0;
  std::int64_t pulse = -1;
  std::string detail;
};

/// One pulse of the benign-transient ledger: the counting inequality's
/// prediction next to what actually happened to the state agreement.
/// predicted follows ceil(n/3)-1+w < floor(n/3)+1+alpha < floor(2n/3)+1-x;
/// observed is empty when the honest replicas entered the pulse divergent
/// (nothing to preserve).
struct BenignRow {
  std::int64_t pulse = 0;
  int x = 0;
  int w = 0;
  bool predicted = false;
  std::optional<bool> observed;
};

struct CheckOutcome {
  std::vector<Violation> violations;
  std::vector<BenignRow> benign;
  std::map<std::string, std::int64_t> checked;  // property -> opportunities
};

inline const std::vector<std::string>& check_properties() {
  static const std::vector<std::string> props = {
      "consistency",       "interval_validity", "strong_state_validity",
      "round_exactness",   "order",             "transition"};
  return props;
}

/// Evaluates every per-pulse invariant of a finished run. Violations are
/// recorded, never asserted; campaigns beyond the fault bounds count them on
/// purpose.
inline CheckOutcome check_sim(const SimResult& sim, const ValidatedConfig& vc,
                              std::uint64_t seed) {
  CheckOutcome out;
  for (const std::string& p : check_properties()) out.checked[p] = 0;
  const int n = sim.n;
  const ScenarioConfig& cfg = vc.cfg;
  const int b = round_budget(n, sim.f);
  const int r = mba_rounds(sim.f);

  auto add = [&](const std::string& prop, std::int64_t pulse, std::string detail) {
    out.violations.push_back({prop, seed, pulse, std::move(detail)});
  };
  auto honest = [&](int i) { return !sim.byzantine[i]; };

  // decide rounds from the trace, keyed (pulse, proc, what)
  std::map<std::tuple<std::int64_t, int, std::string>, std::int64_t> decide_rounds;
  for (const TraceEvent& e : sim.trace.events())
    if (e.kind == "decide")
      decide_rounds[{e.pulse, e.proc, e.data.at("what").get<std::string>()}] = e.round;

  for (const PulseSummary& ps : sim.pulses) {
    // agreement on both decided values
    ++out.checked["consistency"];
    std::optional<Value> ai, as;
    bool consistent = true;
    for (int i = 0; i < n; ++i) {
      if (!honest(i)) continue;
      if (!ai) {
        ai = ps.agreed_input[i];
        as = ps.agreed_state[i];
      } else if (*ai != ps.agreed_input[i] || *as != ps.agreed_state[i]) {
        consistent = false;
      }
    }
    if (!consistent || !ai || ai->is_bottom() || as->is_bottom()) {
      std::ostringstream d;
      d << "honest agreed values diverge or are bottom:";
      for (int i = 0; i < n; ++i)
        if (honest(i))
          d << " p" << i + 1 << "=(" << ps.agreed_input[i].str() << ","
            << ps.agreed_state[i].str() << ")";
      add("consistency", ps.pulse, d.str());
    }

    // interval validity on the agreed input, against uncorrupted honest inputs
    ++out.checked["interval_validity"];
    std::vector<std::int64_t> t;
    for (int i = 0; i < n; ++i) {
      if (!honest(i)) continue;
      bool corrupted = false;
      for (const Corruption& c : ps.corruptions)
        if (c.proc == i + 1 && c.hit_input) corrupted = true;
      if (!corrupted && !ps.external_inputs[i].is_bottom())
        t.push_back(ps.external_inputs[i].payload());
    }
    if (!t.empty() && ai && !ai->is_bottom()) {
      const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
      if (ai->payload() < *lo || ai->payload() > *hi) {
        std::ostringstream d;
        d << "agreed input " << ai->payload() << " outside honest range [" << *lo << ", "
          << *hi << "]";
        add("interval_validity", ps.pulse, d.str());
      }
    }

    // strong validity on the state: only meaningful when the honest replicas
    // entered the pulse in a common state
    int x_state = 0;
    std::map<std::int64_t, int> corrupted_states;
    for (const Corruption& c : ps.corruptions)
      if (c.hit_state) {
        ++x_state;
        if (!c.new_state.is_bottom()) ++corrupted_states[c.new_state.payload()];
      }
    int w = 0;
    for (const auto& [val, count] : corrupted_states) w = std::max(w, count);
    std::optional<bool> observed;
    if (ps.entry_common_state && as && !as->is_bottom()) {
      ++out.checked["strong_state_validity"];
      observed = as->payload() == *ps.entry_common_state;
      if (!*observed) {
        std::ostringstream d;
        d << "agreed state " << as->payload() << " != common entry state "
          << *ps.entry_common_state << " (x=" << x_state << ", w=" << w << ")";
        add("strong_state_validity", ps.pulse, d.str());
      }
    }
    {
      BenignRow row;
      row.pulse = ps.pulse;
      row.x = x_state;
      row.w = w;
      const int thr = n / 3 + 1 + cfg.bounds.alpha;
      row.predicted = ((n + 2) / 3 - 1 + w < thr) && (thr < 2 * n / 3 + 1 - x_state);
      row.observed = observed;
      out.benign.push_back(row);
    }

    // decide rounds pinned to the agreement windows
    ++out.checked["round_exactness"];
    for (int i = 0; i < n; ++i) {
      if (!honest(i)) continue;
      auto it_in = decide_rounds.find({ps.pulse, i + 1, "input"});
      auto it_st = decide_rounds.find({ps.pulse, i + 1, "state"});
      const std::int64_t base = ps.pulse * b;
      if (it_in == decide_rounds.end() || it_in->second != base + r - 1 ||
          it_st == decide_rounds.end() || it_st->second != base + 2 * r - 1) {
        add("round_exactness", ps.pulse,
            "p" + std::to_string(i + 1) + " decide rounds off the expected schedule");
        break;
      }
    }

    // replicas apply the machine to the agreed pair
    ++out.checked["transition"];
    if (ai && !ai->is_bottom() && !as->is_bottom()) {
      const std::int64_t q = cfg.machine.clamp_state(as->payload());
      const std::int64_t in_val = cfg.machine.sanitize_input(ai->payload());
      const std::int64_t expect = cfg.machine.apply(q, in_val);
      for (int i = 0; i < n; ++i)
        if (honest(i) && ps.next_state[i] != expect) {
          add("transition", ps.pulse,
              "p" + std::to_string(i + 1) + " applied " + std::to_string(ps.next_state[i]) +
                  ", expected " + std::to_string(expect));
          break;
        }
    }
  }

  // order: identical (input, state) history at every honest replica
  ++out.checked["order"];
  std::optional<std::vector<std::pair<std::int64_t, std::int64_t>>> history;
  for (int i = 0; i < n; ++i) {
    if (!honest(i)) continue;
    std::vector<std::pair<std::int64_t, std::int64_t>> h;
    for (const PulseSummary& ps : sim.pulses) {
      if (ps.agreed_input[i].is_bottom() || ps.agreed_state[i].is_bottom()) continue;
      h.emplace_back(ps.agreed_input[i].payload(), ps.agreed_state[i].payload());
    }
    if (!history) {
      history = std::move(h);
    } else if (*history != h) {
      add("order", -1, "p" + std::to_string(i + 1) + " processed a different command history");
      break;
    }
  }

  return out;
}

/// Structural checks on a trace: per (round, process) events must march
/// through input, send, receive, compute in order, and when send/deliver
/// counters are present (verbosity >= 1) every sent message must have been
/// delivered exactly once.
inline std::vector<std::string> check_trace_structure(const Trace& trace) {
  std::vector<std::string> problems;
  std::map<std::pair<std::int64_t, int>, int> last_phase;
  std::map<std::int64_t, std::int64_t> sent, delivered;
  for (const TraceEvent& e : trace.events()) {
    const int ph = static_cast<int>(e.phase);
    auto key = std::make_pair(e.round, e.proc);
    auto it = last_phase.find(key);
    if (it != last_phase.end() && ph < it->second) {
      problems.push_back("phase order violated at round " + std::to_string(e.round) + " proc " +
                         std::to_string(e.proc));
    }
    last_phase[key] = ph;
    if (e.kind == "send") sent[e.round] += e.data.at("messages").get<std::int64_t>();
    if (e.kind == "deliver") delivered[e.round] += e.data.at("messages").get<std::int64_t>();
  }
  for (const auto& [round, count] : sent)
    if (delivered[round] != count)
      problems.push_back("round " + std::to_string(round) + ": sent " + std::to_string(count) +
                         " != delivered " + std::to_string(delivered[round]));
  return problems;
}

}  // namespace pulsebft
