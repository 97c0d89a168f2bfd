#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pulsebft/config.hpp"
#include "pulsebft/engine.hpp"
#include "pulsebft/value.hpp"
#include "pulsebft/wire.hpp"

namespace pulsebft {

/// Frames of one round bucketed per sender, ascending sender order.
struct ParsedInbox {
  std::vector<std::pair<ProcessId, std::vector<Frame>>> senders;

  static ParsedInbox from(const Inbox& in) {
    ParsedInbox p;
    p.senders.reserve(in.from.size());
    for (const auto& [sender, bytes] : in.from)
      p.senders.emplace_back(sender, parse_frames(bytes));
    return p;
  }
};

/// A process is perplexed when at least (n-f)/2 of the other entries differ
/// from its own value; evaluated as 2c >= n-f in exact integer arithmetic.
/// Missing or garbled first-round messages arrive as bottom and count as
/// different.
inline bool perplexity_flag(Value own, const std::vector<Value>& received, int n, int f,
                            ProcessId self) {
  int c = 0;
  for (int i = 0; i < n; ++i) {
    if (i + 1 == self) continue;
    if (received[i] != own) ++c;
  }
  return 2 * c >= n - f;
}

/// Alert when at least n-2f of the perplexity claims (own flag included) are
/// set. The final say on alert comes from binary agreement, not this local
/// count.
inline bool alert_flag(const std::vector<char>& perplexed_claims, int n, int f) {
  int d = 0;
  for (int i = 0; i < n; ++i)
    if (perplexed_claims[i]) ++d;
  return d >= n - 2 * f;
}

/// Binary consensus, phase-king style: f+1 phases of three rounds (vote,
/// propose, king), tolerating 3f < n. All non-faulty processes decide the
/// same bit, and a unanimous non-faulty input is always the decision.
class PkSession {
 public:
  PkSession() = default;
  PkSession(int n, int f, ProcessId self, std::uint16_t instance, bool input)
      : n_(n), f_(f), self_(self), instance_(instance), x_(input) {}

  int phases() const { return f_ + 1; }

  std::optional<Frame> vote_frame(int phase) const {
    return Frame::vote(instance_, static_cast<std::uint16_t>(phase), x_);
  }

  void absorb_votes(int phase, const ParsedInbox& in) {
    int c[2] = {0, 0};
    tally(in, Tag::PhaseKingVote, phase, c);
    proposal_.reset();
    if (c[0] >= n_ - f_ || c[1] >= n_ - f_) proposal_ = c[1] > c[0];
  }

  std::optional<Frame> propose_frame(int phase) const {
    if (!proposal_) return std::nullopt;
    return Frame::vote(instance_, static_cast<std::uint16_t>(phase), *proposal_);
  }

  void absorb_proposals(int phase, const ParsedInbox& in) {
    int d[2] = {0, 0};
    tally(in, Tag::PhaseKingVote, phase, d);
    const bool lead = d[1] > d[0];
    if (d[lead] >= n_ - f_) {
      x_ = lead;
      strong_ = true;
    } else if (d[lead] >= f_ + 1) {
      x_ = lead;
      strong_ = false;
    } else {
      strong_ = false;
    }
  }

  std::optional<Frame> king_frame(int phase) const {
    if (self_ != RoundShape::king_of(phase, n_)) return std::nullopt;
    return Frame::king(instance_, static_cast<std::uint16_t>(phase), x_);
  }

  void absorb_king(int phase, const ParsedInbox& in) {
    const ProcessId king = RoundShape::king_of(phase, n_);
    std::optional<bool> king_bit;
    for (const auto& [sender, frames] : in.senders) {
      if (sender != king) continue;  // king frames from anyone else are noise
      for (const Frame& fr : frames)
        if (fr.tag == Tag::KingBroadcast && fr.instance == instance_ &&
            fr.phase == static_cast<std::uint16_t>(phase)) {
          king_bit = fr.bit;
          break;
        }
      break;
    }
    if (!strong_ && king_bit) x_ = *king_bit;
  }

  bool decision() const { return x_; }

 private:
  void tally(const ParsedInbox& in, Tag tag, int phase, int counts[2]) const {
    for (const auto& [sender, frames] : in.senders) {
      (void)sender;
      for (const Frame& fr : frames)
        if (fr.tag == tag && fr.instance == instance_ &&
            fr.phase == static_cast<std::uint16_t>(phase)) {
          ++counts[fr.bit ? 1 : 0];
          break;  // first matching frame per sender counts
        }
    }
  }

  int n_ = 0, f_ = 0;
  ProcessId self_ = 0;
  std::uint16_t instance_ = 0;
  bool x_ = false;
  bool strong_ = false;
  std::optional<bool> proposal_;
};

/// One weak-validity agreement instance (Turpin-Coan): broadcast values,
/// exchange perplexity claims, agree on the alert bit with phase-king, then
/// either return bottom (alert) or the majority value among the content
/// entries. Runs 2 + 3*(f+1) rounds.
///
/// The pseudocode form of this protocol returns bottom as soon as the local
/// perplexity count crosses its threshold, before any agreement; that would
/// let processes exit with different values. The alert bit always goes
/// through binary agreement here and bottom is returned exactly when the
/// agreed bit is true.
class TcSession {
 public:
  TcSession() = default;
  TcSession(int n, int f, ProcessId self, std::uint16_t instance, Value own)
      : n_(n), f_(f), self_(self), instance_(instance), own_(own) {
    v_.assign(n, Value::bottom());
    p_.assign(n, 0);
  }

  Frame value_frame() const { return Frame::initial(instance_, own_); }

  void absorb_values(const ParsedInbox& in) {
    for (const auto& [sender, frames] : in.senders)
      for (const Frame& fr : frames)
        if (fr.tag == Tag::InitialValue && fr.instance == instance_) {
          v_[sender - 1] = fr.value;
          break;
        }
    perplexed_ = perplexity_flag(own_, v_, n_, f_, self_);
  }

  std::optional<Frame> claim_frame() const {
    if (!perplexed_) return std::nullopt;
    return Frame::perplexed(instance_);
  }

  void absorb_claims(const ParsedInbox& in) {
    for (const auto& [sender, frames] : in.senders)
      for (const Frame& fr : frames)
        if (fr.tag == Tag::Perplexed && fr.instance == instance_) {
          p_[sender - 1] = 1;
          break;
        }
    alert_ = alert_flag(p_, n_, f_);
    pk_ = PkSession(n_, f_, self_, instance_, alert_);
  }

  PkSession& pk() { return pk_; }

  Value decide() const {
    if (pk_.decision()) return Value::bottom();
    // Majority among the entries whose senders stayed content. A bottom
    // entry is a first-class candidate: a process may legitimately hold the
    // default (a faulty sender can induce it in the callers' first round),
    // and it broadcasts that default to everyone just like a value. Skipping
    // such entries would let receivers with different views of the faulty
    // senders tally different vote sets and exit with different results.
    // Ties go to the smaller candidate, with bottom below every value.
    std::map<std::int64_t, int> tally;  // keyed by raw rep; bottom's rep sorts first
    for (int i = 0; i < n_; ++i)
      if (!p_[i]) ++tally[v_[i].rep()];
    if (tally.empty()) return Value::bottom();  // only possible past the fault bounds
    std::int64_t best = 0;
    int best_count = 0;
    for (const auto& [rep, count] : tally)
      if (count > best_count) {
        best = rep;
        best_count = count;
      }
    return Value::from_rep(best);
  }

  bool perplexed() const { return perplexed_; }
  bool local_alert() const { return alert_; }
  bool agreed_alert() const { return pk_.decision(); }

 private:
  int n_ = 0, f_ = 0;
  ProcessId self_ = 0;
  std::uint16_t instance_ = 0;
  Value own_;
  std::vector<Value> v_;
  std::vector<char> p_;
  bool perplexed_ = false;
  bool alert_ = false;
  PkSession pk_;
};

}  // namespace pulsebft
