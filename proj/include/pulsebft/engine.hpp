#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pulsebft/config.hpp"
#include "pulsebft/rng.hpp"
#include "pulsebft/trace.hpp"
#include "pulsebft/value.hpp"
#include "pulsebft/wire.hpp"

namespace pulsebft {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RoundCtx {
  std::int64_t pulse = 0;
  int round_in_pulse = 0;
  std::int64_t abs_round = 0;
  int n = 0;
};

/// What the running protocol expects in the current round. The engine hands
/// this to adversaries so they can shape well-formed interference; honest
/// handlers derive the same layout themselves.
struct RoundShape {
  enum class Kind {
    MbaBroadcast,  // outer initial-value broadcast (instance 0)
    TcValue,       // weak-agreement round 1, instances lo..hi
    TcClaim,       // weak-agreement round 2
    PkVote,        // phase-king sub-round 1
    PkPropose,     // phase-king sub-round 2
    PkKing,        // phase-king sub-round 3
    Transition,    // replica transition round, no traffic
    Idle,
  };
  Kind kind = Kind::Idle;
  int pk_phase = 0;      // 1-based, PThis* rounds only
  int instance_lo = 0;   // active instance id range, inclusive
  int instance_hi = 0;

  static int king_of(int phase, int n) { return (phase - 1) % n + 1; }
};

/// Layout of one median-agreement run of mba_rounds(f) rounds.
inline RoundShape mba_shape(int local_round, int n, int f) {
  RoundShape s;
  if (local_round == 0) {
    s.kind = RoundShape::Kind::MbaBroadcast;
    return s;
  }
  s.instance_lo = 1;
  s.instance_hi = n;
  if (local_round == 1) {
    s.kind = RoundShape::Kind::TcValue;
  } else if (local_round == 2) {
    s.kind = RoundShape::Kind::TcClaim;
  } else {
    int q = local_round - 3;
    s.pk_phase = q / 3 + 1;
    switch (q % 3) {
      case 0: s.kind = RoundShape::Kind::PkVote; break;
      case 1: s.kind = RoundShape::Kind::PkPropose; break;
      default: s.kind = RoundShape::Kind::PkKing; break;
    }
  }
  (void)f;
  return s;
}

/// Layout of a standalone weak-agreement run (no outer broadcast), instance 0.
inline RoundShape weak_shape(int local_round, int n, int f) {
  RoundShape s = mba_shape(local_round + 1, n, f);
  s.instance_lo = 0;
  s.instance_hi = 0;
  return s;
}

/// Layout of a standalone binary phase-king run, instance 0.
inline RoundShape pk_shape(int local_round) {
  RoundShape s;
  s.pk_phase = local_round / 3 + 1;
  switch (local_round % 3) {
    case 0: s.kind = RoundShape::Kind::PkVote; break;
    case 1: s.kind = RoundShape::Kind::PkPropose; break;
    default: s.kind = RoundShape::Kind::PkKing; break;
  }
  return s;
}

/// Layout of one replication pulse: input agreement, state agreement,
/// transition round.
inline RoundShape smr_shape(int round_in_pulse, int n, int f) {
  const int r = mba_rounds(f);
  if (round_in_pulse < r) return mba_shape(round_in_pulse, n, f);
  if (round_in_pulse < 2 * r) return mba_shape(round_in_pulse - r, n, f);
  RoundShape s;
  s.kind = RoundShape::Kind::Transition;
  return s;
}

struct Outbox {
  std::vector<Bytes> to;  // index r-1 addresses process r; empty = no message

  static Outbox silent(int n) {
    Outbox o;
    o.to.resize(n);
    return o;
  }
  static Outbox broadcast(int n, Bytes b) {
    Outbox o;
    o.to.assign(n, b);
    return o;
  }
  bool uniform() const {
    for (const Bytes& b : to)
      if (b != to.front()) return false;
    return true;
  }
};

struct Inbox {
  std::vector<std::pair<ProcessId, Bytes>> from;  // ascending sender id
};

class ProcessHandler {
 public:
  virtual ~ProcessHandler() = default;
  virtual void on_input(const RoundCtx&, Value) {}
  virtual Outbox on_send(const RoundCtx&) = 0;
  virtual void on_receive(const RoundCtx&, const Inbox&) = 0;
};

class AdversaryStrategy {
 public:
  virtual ~AdversaryStrategy() = default;
  virtual Outbox outbox(const RoundCtx&, const RoundShape&, ProcessId member, Rng&) = 0;
};

/// Global configuration of one simulation: the processes, their in-flight
/// messages, the pulse schedule, and the deterministic randomness. All
/// mutation happens through step_round.
struct RoundWorld {
  int n = 0;
  int f_max = 0;
  PulseSchedule schedule;
  std::vector<std::unique_ptr<ProcessHandler>> procs;  // size n, index id-1
  std::vector<bool> byzantine;                         // size n
  AdversaryStrategy* adversary = nullptr;
  std::function<RoundShape(const RoundCtx&)> shape;
  std::function<std::vector<Value>(std::int64_t pulse)> input_provider;  // pulse starts
  std::function<void(std::int64_t pulse)> pulse_hook;  // runs after the input phase
  Rng rng{0};
  Trace trace;

  bool is_byzantine(ProcessId p) const { return byzantine[p - 1]; }
  ProcessHandler& handler(ProcessId p) { return *procs[p - 1]; }

  RoundCtx ctx() const {
    RoundCtx c;
    c.pulse = schedule.pulse_index;
    c.round_in_pulse = schedule.round_in_pulse;
    c.abs_round = schedule.abs_round();
    c.n = n;
    return c;
  }
};

/// One synchronous round: input phase (pulse starts only), send phase with
/// Byzantine overrides, receive phase delivering every message under its true
/// sender id, then the computation phase. Non-Byzantine senders must
/// broadcast uniformly; divergence is a model violation and stops the run.
inline void step_round(RoundWorld& w) {
  const RoundCtx c = w.ctx();
  const RoundShape shape = w.shape ? w.shape(c) : RoundShape{};

  if (w.schedule.at_pulse_start()) {
    if (w.input_provider) {
      std::vector<Value> inputs = w.input_provider(c.pulse);
      if (static_cast<int>(inputs.size()) != w.n)
        throw SimError("input provider returned wrong width");
      for (ProcessId p = 1; p <= w.n; ++p) {
        w.handler(p).on_input(c, inputs[p - 1]);
        if (w.trace.verbosity >= 1)
          w.trace.add(c.pulse, c.abs_round, TracePhase::Input, p, "input",
                      {{"value", inputs[p - 1].is_bottom()
                                     ? Json(nullptr)
                                     : Json(inputs[p - 1].payload())}});
      }
    }
    if (w.pulse_hook) w.pulse_hook(c.pulse);
  }

  // send phase
  std::vector<Outbox> outgoing;
  outgoing.reserve(w.n);
  std::int64_t sent = 0;
  for (ProcessId p = 1; p <= w.n; ++p) {
    // every handler runs its send step; the faults module then overrides the
    // outboxes of Byzantine members
    Outbox o = w.handler(p).on_send(c);
    if (w.is_byzantine(p) && w.adversary) o = w.adversary->outbox(c, shape, p, w.rng);
    if (static_cast<int>(o.to.size()) != w.n) throw SimError("outbox width != n");
    if (!w.is_byzantine(p) && !o.uniform())
      throw SimError("non-Byzantine process " + std::to_string(p) +
                     " attempted per-recipient divergent messages in round " +
                     std::to_string(c.abs_round));
    for (const Bytes& b : o.to)
      if (!b.empty()) ++sent;
    if (w.trace.verbosity >= 1) {
      std::int64_t count = 0;
      for (const Bytes& b : o.to)
        if (!b.empty()) ++count;
      w.trace.add(c.pulse, c.abs_round, TracePhase::Send, p, "send", {{"messages", count}});
    }
    outgoing.push_back(std::move(o));
  }

  // receive phase: synchronous reliable delivery, ascending sender order
  std::vector<Inbox> inboxes(w.n);
  std::int64_t delivered = 0;
  for (ProcessId sender = 1; sender <= w.n; ++sender)
    for (ProcessId rcpt = 1; rcpt <= w.n; ++rcpt) {
      Bytes& b = outgoing[sender - 1].to[rcpt - 1];
      if (b.empty()) continue;
      inboxes[rcpt - 1].from.emplace_back(sender, std::move(b));
      ++delivered;
    }
  if (delivered != sent) throw SimError("delivery mismatch");  // unreachable by construction
  if (w.trace.verbosity >= 1)
    for (ProcessId p = 1; p <= w.n; ++p)
      w.trace.add(c.pulse, c.abs_round, TracePhase::Receive, p, "deliver",
                  {{"messages", static_cast<std::int64_t>(inboxes[p - 1].from.size())}});

  // computation phase; inboxes are consumed and empty at the round boundary
  for (ProcessId p = 1; p <= w.n; ++p)
    w.handler(p).on_receive(c, inboxes[p - 1]);

  w.schedule.advance();
}

inline void run_rounds(RoundWorld& w, std::int64_t count) {
  for (std::int64_t i = 0; i < count; ++i) step_round(w);
}

}  // namespace pulsebft
