#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pulsebft/engine.hpp"
#include "pulsebft/machine.hpp"
#include "pulsebft/median_mvba.hpp"
#include "pulsebft/value.hpp"

namespace pulsebft {

struct ReplicaState {
  Value input_value;
  Value current_state;
};

/// Replica protocol for one process: every pulse agrees on the next input,
/// then on the current state, then applies the machine transition. The two
/// agreement runs occupy rounds [0, R) and [R, 2R) of the pulse with
/// R = mba_rounds(f); the final round is the transition round.
///
/// The agreed state rides the agreement domain as a plain integer. For
/// machines with enumerated states an out-of-range agreed state (possible
/// only past the fault bounds) is clamped to the nearest valid index and
/// flagged; agreed inputs outside a table machine's alphabet map to the
/// nearest alphabet element.
class SmrHandler : public ProcessHandler {
 public:
  SmrHandler(int n, int f, ProcessId self, const StateMachineSpec* machine, SelectParams sel,
             ReplicaState init)
      : n_(n), f_(f), self_(self), machine_(machine), sel_(sel), rep_(init) {}

  void on_input(const RoundCtx&, Value v) override { rep_.input_value = v; }

  Outbox on_send(const RoundCtx& c) override {
    const int r = mba_rounds(f_);
    const int rin = c.round_in_pulse;
    if (rin == 0) mba_ = MbaSession(n_, f_, self_, rep_.input_value, sel_);
    if (rin == r) mba_ = MbaSession(n_, f_, self_, rep_.current_state, sel_);
    if (rin >= 2 * r) return Outbox::silent(n_);  // transition round carries no traffic
    Bytes b = encode_frames(mba_.frames_for(rin < r ? rin : rin - r));
    return b.empty() ? Outbox::silent(n_) : Outbox::broadcast(n_, std::move(b));
  }

  void on_receive(const RoundCtx& c, const Inbox& in) override {
    const int r = mba_rounds(f_);
    const int rin = c.round_in_pulse;
    if (rin < 2 * r) {
      mba_.absorb(rin < r ? rin : rin - r, ParsedInbox::from(in));
      if (rin == r - 1) {
        agreed_input_ = *mba_.decision();
        emit(c, "decide", {{"what", "input"}, {"value", agreed_input_->payload()}});
      } else if (rin == 2 * r - 1) {
        agreed_state_ = *mba_.decision();
        emit(c, "decide", {{"what", "state"}, {"value", agreed_state_->payload()}});
      }
      return;
    }

    // transition round
    std::int64_t q = agreed_state_->payload();
    clamped_ = false;
    if (!machine_->valid_state(q)) {
      std::int64_t fixed = machine_->clamp_state(q);
      emit(c, "anomaly",
           {{"reason", "agreed state outside machine states"}, {"state", q}, {"clamped", fixed}});
      q = fixed;
      clamped_ = true;
    }
    const std::int64_t in_val = machine_->sanitize_input(agreed_input_->payload());
    const std::int64_t next = machine_->apply(q, in_val);
    rep_.input_value = *agreed_input_;
    rep_.current_state = Value::of(next);
    emit(c, "transition", {{"state", next}});
  }

  ReplicaState& replica() { return rep_; }
  const ReplicaState& replica() const { return rep_; }
  std::optional<Value> agreed_input() const { return agreed_input_; }
  std::optional<Value> agreed_state() const { return agreed_state_; }
  bool clamped_this_pulse() const { return clamped_; }

  void attach_trace(Trace* t) { trace_ = t; }

 private:
  void emit(const RoundCtx& c, const char* kind, Json data) {
    if (trace_) trace_->add(c.pulse, c.abs_round, TracePhase::Compute, self_, kind, std::move(data));
  }

  int n_, f_;
  ProcessId self_;
  const StateMachineSpec* machine_;
  SelectParams sel_;
  ReplicaState rep_;
  MbaSession mba_;
  std::optional<Value> agreed_input_;
  std::optional<Value> agreed_state_;
  bool clamped_ = false;
  Trace* trace_ = nullptr;
};

/// One pulse over fresh engine state: convenience wrapper used by tests and
/// the single-pulse examples. Byzantine behaviour and transient corruption
/// are assumed to have been applied to `replicas` by the caller; all
/// processes here run the honest protocol.
inline std::vector<ReplicaState> smr_pulse(int n, int f, const StateMachineSpec& machine,
                                           SelectParams sel, std::vector<ReplicaState> replicas,
                                           const std::vector<Value>& external_inputs) {
  RoundWorld w;
  w.n = n;
  w.f_max = f;
  w.schedule.rounds_per_pulse = round_budget(n, f);
  w.byzantine.assign(n, false);
  w.shape = [n, f](const RoundCtx& c) { return smr_shape(c.round_in_pulse, n, f); };
  std::vector<SmrHandler*> typed;
  for (ProcessId p = 1; p <= n; ++p) {
    auto h = std::make_unique<SmrHandler>(n, f, p, &machine, sel, replicas[p - 1]);
    typed.push_back(h.get());
    w.procs.push_back(std::move(h));
  }
  w.input_provider = [&](std::int64_t) { return external_inputs; };
  run_rounds(w, w.schedule.rounds_per_pulse);
  std::vector<ReplicaState> out;
  out.reserve(n);
  for (SmrHandler* h : typed) out.push_back(h->replica());
  return out;
}

}  // namespace pulsebft
