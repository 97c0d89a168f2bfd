#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pulsebft/machine.hpp"
#include "pulsebft/value.hpp"

namespace pulsebft {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ceil(n/6) - 1, the transient-fault budget a system of n processes is
/// expected to absorb per pulse.
inline int transient_bound(int n) { return (n + 5) / 6 - 1; }

/// Rounds in one state-replication pulse: two sequential median-agreement
/// runs (each 1 broadcast round, 2 vote-collection rounds, 3*(f+1)
/// phase-king rounds) plus one transition round.
inline int round_budget(int n, int f_max) {
  (void)n;
  return 2 * (1 + 2 + 3 * (f_max + 1)) + 1;
}

/// Rounds in one median-agreement run.
inline int mba_rounds(int f_max) { return 3 + 3 * (f_max + 1); }

/// Rounds in one weak-agreement (Turpin-Coan) run.
inline int weak_rounds(int f_max) { return 2 + 3 * (f_max + 1); }

/// Rounds in one binary phase-king run.
inline int phase_king_rounds(int f_max) { return 3 * (f_max + 1); }

struct FaultBounds {
  int n = 0;
  int f_max = 0;   // Byzantine bound
  int r_max = 0;   // per-pulse transient bound
  int alpha = 0;   // resilience margin on the most-common threshold
};

struct PulseSchedule {
  int rounds_per_pulse = 1;  // b
  std::int64_t pulse_index = 0;
  int round_in_pulse = 0;

  bool at_pulse_start() const { return round_in_pulse == 0; }
  std::int64_t abs_round() const {
    return pulse_index * rounds_per_pulse + round_in_pulse;
  }
  void advance() {
    if (++round_in_pulse == rounds_per_pulse) {
      round_in_pulse = 0;
      ++pulse_index;
    }
  }
};

struct ByzantineStrategyCfg {
  enum class Kind { None, Silent, Random, EquivocateSplit, Collude, Exhaustive };
  Kind kind = Kind::None;
  std::set<ProcessId> members;
  Value target;                    // collude
  Value split_a, split_b;          // equivocate-split
  std::uint64_t strategy_index = 0;  // exhaustive: which decoded strategy to play
};

struct TransientModelCfg {
  enum class Kind { None, Malicious, Uniform };
  enum class Fields { State, Input, Both };
  Kind kind = Kind::None;
  Value target;               // malicious
  std::uint64_t domain = 1ull << 16;  // uniform: z
  int per_pulse = 0;          // x
  Fields fields = Fields::State;
};

struct InputSpec {
  enum class Kind { Fixed, PerPulse, Uniform };
  Kind kind = Kind::Fixed;
  std::int64_t fixed = 0;
  std::vector<std::vector<std::int64_t>> rows;  // per pulse, n entries
  std::int64_t lo = 0, hi = 0;                  // uniform generator
};

enum class ThresholdBase { K, N };

struct ScenarioConfig {
  FaultBounds bounds;
  std::int64_t pulses = 1;
  std::uint64_t seed = 0;
  ByzantineStrategyCfg byzantine;
  TransientModelCfg transients;
  StateMachineSpec machine;
  InputSpec inputs;
  ThresholdBase threshold_base = ThresholdBase::K;
  bool self_stabilization = false;
  int trace_verbosity = 0;
  std::int64_t initial_state = 0;
  std::int64_t initial_input = 0;
};

struct ValidatedConfig {
  ScenarioConfig cfg;
  std::vector<std::string> warnings;
};

/// Structural problems are hard errors; exceeded fault bounds only warn,
/// because campaigns deliberately run past them to locate the thresholds.
inline ValidatedConfig validate_config(const ScenarioConfig& in) {
  ValidatedConfig out;
  out.cfg = in;
  const FaultBounds& b = in.bounds;

  if (b.n < 4) throw ConfigError("n below minimum: need n >= 4, got " + std::to_string(b.n));
  if (b.f_max < 0) throw ConfigError("f_max must be nonnegative");
  if (b.r_max < 0) throw ConfigError("r_max must be nonnegative");
  if (b.alpha < 0) throw ConfigError("alpha must be nonnegative");
  if (in.pulses < 1) throw ConfigError("pulses must be >= 1");
  try {
    in.machine.check();
  } catch (const MachineError& e) {
    throw ConfigError(std::string("machine: ") + e.what());
  }
  for (ProcessId p : in.byzantine.members)
    if (p < 1 || p > b.n)
      throw ConfigError("byzantine member out of range: " + std::to_string(p));
  if (in.byzantine.kind != ByzantineStrategyCfg::Kind::None && in.byzantine.members.empty())
    throw ConfigError("byzantine strategy given but member set is empty");
  if (in.byzantine.kind == ByzantineStrategyCfg::Kind::None && !in.byzantine.members.empty())
    throw ConfigError("byzantine members given but strategy kind is none");
  if (in.transients.kind != TransientModelCfg::Kind::None && in.transients.per_pulse < 0)
    throw ConfigError("transient count x must be nonnegative");
  if (in.transients.kind == TransientModelCfg::Kind::Uniform && in.transients.domain < 1)
    throw ConfigError("uniform transient domain z must be >= 1");
  if (in.inputs.kind == InputSpec::Kind::PerPulse) {
    if (static_cast<std::int64_t>(in.inputs.rows.size()) < in.pulses)
      throw ConfigError("inputs rows cover fewer pulses than configured");
    for (const auto& row : in.inputs.rows)
      if (static_cast<int>(row.size()) != b.n)
        throw ConfigError("inputs row width != n");
  }
  if (in.inputs.kind == InputSpec::Kind::Uniform && in.inputs.lo > in.inputs.hi)
    throw ConfigError("inputs generator has lo > hi");
  if (!in.machine.valid_state(in.initial_state))
    throw ConfigError("initial_state outside the machine's state set");

  if (3 * b.f_max >= b.n)
    out.warnings.push_back("3*f_max < n violated (f_max=" + std::to_string(b.f_max) +
                           ", n=" + std::to_string(b.n) + ")");
  const int tb = transient_bound(b.n);
  if (b.r_max > tb)
    out.warnings.push_back("r_max exceeds ceil(n/6)-1 = " + std::to_string(tb));
  if (b.alpha > tb)
    out.warnings.push_back("alpha exceeds ceil(n/6)-1 = " + std::to_string(tb));
  if (static_cast<int>(in.byzantine.members.size()) > b.f_max)
    out.warnings.push_back("byzantine member count exceeds f_max");
  if (in.transients.kind != TransientModelCfg::Kind::None && in.transients.per_pulse > b.r_max)
    out.warnings.push_back("transient count x exceeds r_max");
  return out;
}

}  // namespace pulsebft
