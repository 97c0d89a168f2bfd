#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pulsebft/config.hpp"
#include "pulsebft/engine.hpp"
#include "pulsebft/weak_mvba.hpp"

namespace pulsebft {

/// Raised when select_value is handed an all-bottom vector; under 3f < n the
/// honest entries always survive the weak-agreement phase, so this signals
/// violated fault bounds.
class EmptyAgreementVector : public std::runtime_error {
 public:
  EmptyAgreementVector() : std::runtime_error("agreement vector has no non-bottom entries") {}
};

/// Order-preserving copy with every bottom removed; repetitions kept.
inline std::vector<Value> remove_bottom(const std::vector<Value>& a) {
  std::vector<Value> out;
  out.reserve(a.size());
  for (Value v : a)
    if (!v.is_bottom()) out.push_back(v);
  return out;
}

struct SelectParams {
  int alpha = 0;
  ThresholdBase base = ThresholdBase::K;
};

/// The decision rule over the agreed vector. Frequencies are counted over
/// the bottom-free copy of length k; the most common value m (ties to the
/// smallest) is returned when its count reaches floor(B/3)+1+alpha, with B
/// either k or the full width n depending on the configured base. Otherwise
/// the lower middle of the sorted copy is returned: 0-indexed position
/// ceil(k/2)-1, the exact middle for odd k and the lower of the two middle
/// entries for even k. Never returns bottom.
inline Value select_value(const std::vector<Value>& a, const SelectParams& sel) {
  const std::vector<Value> kept = remove_bottom(a);
  const int k = static_cast<int>(kept.size());
  if (k == 0) throw EmptyAgreementVector();

  std::map<std::int64_t, int> freq;
  for (Value v : kept) ++freq[v.payload()];
  std::int64_t most = 0;
  int most_count = 0;
  for (const auto& [val, count] : freq)
    if (count > most_count) {
      most = val;
      most_count = count;
    }

  const int b = sel.base == ThresholdBase::K ? k : static_cast<int>(a.size());
  if (most_count >= b / 3 + 1 + sel.alpha) return Value::of(most);

  std::vector<std::int64_t> sorted;
  sorted.reserve(kept.size());
  for (Value v : kept) sorted.push_back(v.payload());
  std::sort(sorted.begin(), sorted.end());
  return Value::of(sorted[(k + 1) / 2 - 1]);
}

/// One median-agreement run: broadcast the input, run n weak-agreement
/// instances in parallel (instance i settles the entry claimed by process i),
/// then apply select_value to the agreed vector. The instances share rounds;
/// frames carry the instance index. Runs mba_rounds(f) rounds and decides in
/// the last one.
class MbaSession {
 public:
  MbaSession() = default;
  MbaSession(int n, int f, ProcessId self, Value input, SelectParams sel)
      : n_(n), f_(f), self_(self), input_(input), sel_(sel) {
    a_.assign(n, Value::bottom());
  }

  int rounds() const { return mba_rounds(f_); }

  std::vector<Frame> frames_for(int local_round) {
    std::vector<Frame> out;
    const RoundShape s = mba_shape(local_round, n_, f_);
    switch (s.kind) {
      case RoundShape::Kind::MbaBroadcast:
        out.push_back(Frame::initial(0, input_));
        break;
      case RoundShape::Kind::TcValue:
        for (const TcSession& t : tc_) out.push_back(t.value_frame());
        break;
      case RoundShape::Kind::TcClaim:
        for (const TcSession& t : tc_)
          if (auto f = t.claim_frame()) out.push_back(*f);
        break;
      case RoundShape::Kind::PkVote:
        for (TcSession& t : tc_)
          if (auto f = t.pk().vote_frame(s.pk_phase)) out.push_back(*f);
        break;
      case RoundShape::Kind::PkPropose:
        for (TcSession& t : tc_)
          if (auto f = t.pk().propose_frame(s.pk_phase)) out.push_back(*f);
        break;
      case RoundShape::Kind::PkKing:
        for (TcSession& t : tc_)
          if (auto f = t.pk().king_frame(s.pk_phase)) out.push_back(*f);
        break;
      default:
        break;
    }
    return out;
  }

  void absorb(int local_round, const ParsedInbox& in) {
    const RoundShape s = mba_shape(local_round, n_, f_);
    switch (s.kind) {
      case RoundShape::Kind::MbaBroadcast: {
        for (const auto& [sender, frames] : in.senders)
          for (const Frame& fr : frames)
            if (fr.tag == Tag::InitialValue && fr.instance == 0) {
              a_[sender - 1] = fr.value;
              break;
            }
        tc_.clear();
        tc_.reserve(n_);
        for (int i = 0; i < n_; ++i)
          tc_.emplace_back(n_, f_, self_, static_cast<std::uint16_t>(i + 1), a_[i]);
        break;
      }
      case RoundShape::Kind::TcValue:
        for (TcSession& t : tc_) t.absorb_values(in);
        break;
      case RoundShape::Kind::TcClaim:
        for (TcSession& t : tc_) t.absorb_claims(in);
        break;
      case RoundShape::Kind::PkVote:
        for (TcSession& t : tc_) t.pk().absorb_votes(s.pk_phase, in);
        break;
      case RoundShape::Kind::PkPropose:
        for (TcSession& t : tc_) t.pk().absorb_proposals(s.pk_phase, in);
        break;
      case RoundShape::Kind::PkKing:
        for (TcSession& t : tc_) t.pk().absorb_king(s.pk_phase, in);
        if (local_round == rounds() - 1) {
          for (int i = 0; i < n_; ++i) a_[i] = tc_[i].decide();
          decision_ = select_value(a_, sel_);
        }
        break;
      default:
        break;
    }
  }

  const std::vector<Value>& agreed_vector() const { return a_; }
  std::optional<Value> decision() const { return decision_; }

 private:
  int n_ = 0, f_ = 0;
  ProcessId self_ = 0;
  Value input_;
  SelectParams sel_;
  std::vector<Value> a_;
  std::vector<TcSession> tc_;
  std::optional<Value> decision_;
};

/// Engine adapter running a single median-agreement instance.
class MbaHandler : public ProcessHandler {
 public:
  MbaHandler(int n, int f, ProcessId self, Value input, SelectParams sel)
      : n_(n), self_(self), session_(n, f, self, input, sel) {}

  Outbox on_send(const RoundCtx& c) override {
    if (c.abs_round >= session_.rounds()) return Outbox::silent(n_);
    Bytes b = encode_frames(session_.frames_for(static_cast<int>(c.abs_round)));
    return b.empty() ? Outbox::silent(n_) : Outbox::broadcast(n_, std::move(b));
  }

  void on_receive(const RoundCtx& c, const Inbox& in) override {
    if (c.abs_round >= session_.rounds()) return;
    session_.absorb(static_cast<int>(c.abs_round), ParsedInbox::from(in));
    if (session_.decision()) decide_round_ = c.abs_round;
  }

  std::optional<Value> decision() const { return session_.decision(); }
  std::int64_t decide_round() const { return decide_round_; }
  const MbaSession& session() const { return session_; }

 private:
  int n_;
  ProcessId self_;
  MbaSession session_;
  std::int64_t decide_round_ = -1;
};

/// Engine adapter for one standalone weak-agreement (Turpin-Coan) run over
/// instance 0; weak_rounds(f) rounds.
class WeakHandler : public ProcessHandler {
 public:
  WeakHandler(int n, int f, ProcessId self, Value input)
      : n_(n), f_(f), session_(n, f, self, 0, input) {}

  Outbox on_send(const RoundCtx& c) override {
    std::vector<Frame> frames;
    const int r = static_cast<int>(c.abs_round);
    if (r == 0) {
      frames.push_back(session_.value_frame());
    } else if (r == 1) {
      if (auto f = session_.claim_frame()) frames.push_back(*f);
    } else if (r < weak_rounds(f_)) {
      const RoundShape s = mba_shape(r + 1, n_, f_);  // skip the outer broadcast slot
      if (s.kind == RoundShape::Kind::PkVote) {
        if (auto f = session_.pk().vote_frame(s.pk_phase)) frames.push_back(*f);
      } else if (s.kind == RoundShape::Kind::PkPropose) {
        if (auto f = session_.pk().propose_frame(s.pk_phase)) frames.push_back(*f);
      } else if (s.kind == RoundShape::Kind::PkKing) {
        if (auto f = session_.pk().king_frame(s.pk_phase)) frames.push_back(*f);
      }
    }
    Bytes b = encode_frames(frames);
    return b.empty() ? Outbox::silent(n_) : Outbox::broadcast(n_, std::move(b));
  }

  void on_receive(const RoundCtx& c, const Inbox& in) override {
    const int r = static_cast<int>(c.abs_round);
    if (r >= weak_rounds(f_)) return;
    const ParsedInbox parsed = ParsedInbox::from(in);
    if (r == 0) {
      session_.absorb_values(parsed);
    } else if (r == 1) {
      session_.absorb_claims(parsed);
    } else {
      const RoundShape s = mba_shape(r + 1, n_, f_);
      if (s.kind == RoundShape::Kind::PkVote)
        session_.pk().absorb_votes(s.pk_phase, parsed);
      else if (s.kind == RoundShape::Kind::PkPropose)
        session_.pk().absorb_proposals(s.pk_phase, parsed);
      else if (s.kind == RoundShape::Kind::PkKing) {
        session_.pk().absorb_king(s.pk_phase, parsed);
        if (r == weak_rounds(f_) - 1) decision_ = session_.decide();
      }
    }
  }

  std::optional<Value> decision() const { return decision_; }
  const TcSession& session() const { return session_; }

 private:
  int n_, f_;
  TcSession session_;
  std::optional<Value> decision_;
};

/// Engine adapter for one standalone binary phase-king run over instance 0;
/// phase_king_rounds(f) rounds.
class BinaryHandler : public ProcessHandler {
 public:
  BinaryHandler(int n, int f, ProcessId self, bool input)
      : n_(n), f_(f), session_(n, f, self, 0, input) {}

  Outbox on_send(const RoundCtx& c) override {
    const int r = static_cast<int>(c.abs_round);
    if (r >= phase_king_rounds(f_)) return Outbox::silent(n_);
    const int phase = r / 3 + 1;
    std::optional<Frame> fr;
    switch (r % 3) {
      case 0: fr = session_.vote_frame(phase); break;
      case 1: fr = session_.propose_frame(phase); break;
      default: fr = session_.king_frame(phase); break;
    }
    if (!fr) return Outbox::silent(n_);
    Bytes b;
    append_frame(b, *fr);
    return Outbox::broadcast(n_, std::move(b));
  }

  void on_receive(const RoundCtx& c, const Inbox& in) override {
    const int r = static_cast<int>(c.abs_round);
    if (r >= phase_king_rounds(f_)) return;
    const int phase = r / 3 + 1;
    const ParsedInbox parsed = ParsedInbox::from(in);
    switch (r % 3) {
      case 0: session_.absorb_votes(phase, parsed); break;
      case 1: session_.absorb_proposals(phase, parsed); break;
      default:
        session_.absorb_king(phase, parsed);
        if (r == phase_king_rounds(f_) - 1) decision_ = session_.decision();
        break;
    }
  }

  std::optional<bool> decision() const { return decision_; }

 private:
  int n_, f_;
  PkSession session_;
  std::optional<bool> decision_;
};

}  // namespace pulsebft
