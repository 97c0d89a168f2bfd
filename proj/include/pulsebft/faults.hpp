#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "pulsebft/config.hpp"
#include "pulsebft/engine.hpp"
#include "pulsebft/rng.hpp"
#include "pulsebft/smr.hpp"
#include "pulsebft/wire.hpp"

namespace pulsebft {

class SilentStrategy : public AdversaryStrategy {
 public:
  Outbox outbox(const RoundCtx& c, const RoundShape&, ProcessId, Rng&) override {
    return Outbox::silent(c.n);
  }
};

/// Seeded noise: mostly well-formed frames with random values and bits,
/// sprinkled with raw garbage bytes and silence. Handlers must absorb all of
/// it; unparseable content reads as bottom.
class RandomStrategy : public AdversaryStrategy {
 public:
  Outbox outbox(const RoundCtx& c, const RoundShape& s, ProcessId member, Rng& rng) override {
    Outbox o = Outbox::silent(c.n);
    for (int r = 0; r < c.n; ++r) {
      const std::uint64_t pick = rng.below(8);
      if (pick == 0) continue;  // stay silent toward this recipient
      if (pick == 1) {
        Bytes junk;
        const std::uint64_t len = 1 + rng.below(8);
        for (std::uint64_t i = 0; i < len; ++i)
          junk.push_back(static_cast<std::uint8_t>(rng.below(256)));
        o.to[r] = std::move(junk);
        continue;
      }
      std::vector<Frame> frames;
      for (int inst = s.instance_lo; inst <= s.instance_hi; ++inst) {
        if (rng.below(4) == 0) continue;
        const auto iid = static_cast<std::uint16_t>(inst);
        switch (s.kind) {
          case RoundShape::Kind::MbaBroadcast:
          case RoundShape::Kind::TcValue:
            frames.push_back(Frame::initial(
                iid, rng.below(6) == 0 ? Value::bottom() : Value::of(rng.range(-2, 12))));
            break;
          case RoundShape::Kind::TcClaim:
            frames.push_back(Frame::perplexed(iid));
            break;
          case RoundShape::Kind::PkVote:
          case RoundShape::Kind::PkPropose:
            frames.push_back(
                Frame::vote(iid, static_cast<std::uint16_t>(s.pk_phase), rng.coin()));
            break;
          case RoundShape::Kind::PkKing:
            frames.push_back(
                Frame::king(iid, static_cast<std::uint16_t>(s.pk_phase), rng.coin()));
            break;
          default:
            break;
        }
      }
      o.to[r] = encode_frames(frames);
    }
    (void)member;
    return o;
  }
};

/// Two-faced sender: value a (bit 0) to the low half of the ids, value b
/// (bit 1) to the high half.
class EquivocateSplitStrategy : public AdversaryStrategy {
 public:
  EquivocateSplitStrategy(Value a, Value b) : a_(a), b_(b) {}

  Outbox outbox(const RoundCtx& c, const RoundShape& s, ProcessId member, Rng&) override {
    Outbox o = Outbox::silent(c.n);
    for (int r = 0; r < c.n; ++r) {
      const bool low = r + 1 <= c.n / 2;
      std::vector<Frame> frames;
      for (int inst = s.instance_lo; inst <= s.instance_hi; ++inst) {
        const auto iid = static_cast<std::uint16_t>(inst);
        switch (s.kind) {
          case RoundShape::Kind::MbaBroadcast:
          case RoundShape::Kind::TcValue:
            frames.push_back(Frame::initial(iid, low ? a_ : b_));
            break;
          case RoundShape::Kind::TcClaim:
            if (low) frames.push_back(Frame::perplexed(iid));
            break;
          case RoundShape::Kind::PkVote:
          case RoundShape::Kind::PkPropose:
            frames.push_back(Frame::vote(iid, static_cast<std::uint16_t>(s.pk_phase), !low));
            break;
          case RoundShape::Kind::PkKing:
            if (member == RoundShape::king_of(s.pk_phase, c.n))
              frames.push_back(Frame::king(iid, static_cast<std::uint16_t>(s.pk_phase), !low));
            break;
          default:
            break;
        }
      }
      o.to[r] = encode_frames(frames);
    }
    return o;
  }

 private:
  Value a_, b_;
};

/// Coalition pushing one target value: the target in every round where a
/// value is expected, no perplexity claims, bit 0 throughout the alert
/// agreement so the value survives to the tally.
class ColludeStrategy : public AdversaryStrategy {
 public:
  explicit ColludeStrategy(Value target) : target_(target) {}

  Outbox outbox(const RoundCtx& c, const RoundShape& s, ProcessId member, Rng&) override {
    std::vector<Frame> frames;
    for (int inst = s.instance_lo; inst <= s.instance_hi; ++inst) {
      const auto iid = static_cast<std::uint16_t>(inst);
      switch (s.kind) {
        case RoundShape::Kind::MbaBroadcast:
        case RoundShape::Kind::TcValue:
          frames.push_back(Frame::initial(iid, target_));
          break;
        case RoundShape::Kind::PkVote:
        case RoundShape::Kind::PkPropose:
          frames.push_back(Frame::vote(iid, static_cast<std::uint16_t>(s.pk_phase), false));
          break;
        case RoundShape::Kind::PkKing:
          if (member == RoundShape::king_of(s.pk_phase, c.n))
            frames.push_back(Frame::king(iid, static_cast<std::uint16_t>(s.pk_phase), false));
          break;
        default:
          break;
      }
    }
    Bytes b = encode_frames(frames);
    return b.empty() ? Outbox::silent(c.n) : Outbox::broadcast(c.n, std::move(b));
  }

 private:
  Value target_;
};

struct Corruption {
  ProcessId proc = 0;
  bool hit_state = false;
  Value old_state, new_state;
  bool hit_input = false;
  Value old_input, new_input;
};

/// Applies one pulse's worth of recurring transient faults: up to x distinct
/// non-Byzantine replicas, chosen uniformly without replacement, have their
/// local state overwritten. Byzantine members are never selected (they are
/// already unconstrained) and the message channel is untouched. If x exceeds
/// the number of eligible replicas, all of them are corrupted and the caller
/// sees the short list.
inline std::vector<Corruption> inject_transients(
    const TransientModelCfg& model, const std::vector<ProcessId>& eligible,
    const std::function<ReplicaState&(ProcessId)>& replica, Rng& rng) {
  std::vector<Corruption> out;
  if (model.kind == TransientModelCfg::Kind::None || model.per_pulse <= 0) return out;

  std::vector<ProcessId> pool = eligible;
  const int hits = std::min<int>(model.per_pulse, static_cast<int>(pool.size()));
  for (int i = 0; i < hits; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }

  for (int i = 0; i < hits; ++i) {
    const ProcessId p = pool[i];
    ReplicaState& rs = replica(p);
    Corruption c;
    c.proc = p;
    const Value drawn = model.kind == TransientModelCfg::Kind::Malicious
                            ? model.target
                            : Value::of(static_cast<std::int64_t>(rng.below(model.domain)));
    if (model.fields == TransientModelCfg::Fields::State ||
        model.fields == TransientModelCfg::Fields::Both) {
      c.hit_state = true;
      c.old_state = rs.current_state;
      c.new_state = drawn;
      rs.current_state = drawn;
    }
    if (model.fields == TransientModelCfg::Fields::Input ||
        model.fields == TransientModelCfg::Fields::Both) {
      c.hit_input = true;
      c.old_input = rs.input_value;
      c.new_input = drawn;
      rs.input_value = drawn;
    }
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(),
            [](const Corruption& a, const Corruption& b) { return a.proc < b.proc; });
  return out;
}

/// Per-recipient messages for one Byzantine member in one round; thin
/// wrapper so the strategy objects stay the single source of adversarial
/// behaviour.
inline Outbox byzantine_outbox(AdversaryStrategy& strategy, const RoundCtx& c,
                               const RoundShape& shape, ProcessId member, Rng& rng) {
  return strategy.outbox(c, shape, member, rng);
}

/// Fully scripted adversary: one action table covering every stage of an
/// agreement run, indexed by recipient. Decoded from a strategy index so
/// enumeration campaigns can walk a finite grid of message choices; also
/// reachable from scenario files (kind "exhaustive") to replay one strategy.
///
/// Phase-king actions per (pk round, recipient): 0 silent, 1 send bit 0,
/// 2 send bit 1.
struct ExhaustivePlan {
  std::vector<std::optional<Value>> r0;  // outer broadcast; nullopt = silent
  std::vector<std::optional<Value>> tc;  // weak-agreement value round
  std::uint32_t claim_mask = 0;          // bit r-1: claim perplexed toward r
  std::vector<std::vector<std::uint8_t>> pk;  // [pk round][recipient]
};

class PlanStrategy : public AdversaryStrategy {
 public:
  explicit PlanStrategy(ExhaustivePlan plan) : plan_(std::move(plan)) {}

  Outbox outbox(const RoundCtx& c, const RoundShape& s, ProcessId member, Rng&) override {
    Outbox o = Outbox::silent(c.n);
    for (int r = 0; r < c.n; ++r) {
      std::vector<Frame> frames;
      for (int inst = s.instance_lo; inst <= s.instance_hi; ++inst) {
        const auto iid = static_cast<std::uint16_t>(inst);
        switch (s.kind) {
          case RoundShape::Kind::MbaBroadcast:
            if (r < static_cast<int>(plan_.r0.size()) && plan_.r0[r])
              frames.push_back(Frame::initial(iid, *plan_.r0[r]));
            break;
          case RoundShape::Kind::TcValue:
            if (r < static_cast<int>(plan_.tc.size()) && plan_.tc[r])
              frames.push_back(Frame::initial(iid, *plan_.tc[r]));
            break;
          case RoundShape::Kind::TcClaim:
            if (plan_.claim_mask & (1u << r)) frames.push_back(Frame::perplexed(iid));
            break;
          case RoundShape::Kind::PkVote:
          case RoundShape::Kind::PkPropose:
          case RoundShape::Kind::PkKing: {
            const int pk_round = (s.pk_phase - 1) * 3 +
                                 (s.kind == RoundShape::Kind::PkVote      ? 0
                                  : s.kind == RoundShape::Kind::PkPropose ? 1
                                                                          : 2);
            if (pk_round >= static_cast<int>(plan_.pk.size())) break;
            const auto& row = plan_.pk[pk_round];
            const std::uint8_t act = r < static_cast<int>(row.size()) ? row[r] : 0;
            if (act == 0) break;
            const bool bit = act == 2;
            const auto ph = static_cast<std::uint16_t>(s.pk_phase);
            frames.push_back(s.kind == RoundShape::Kind::PkKing ? Frame::king(iid, ph, bit)
                                                                : Frame::vote(iid, ph, bit));
            break;
          }
          default:
            break;
        }
      }
      o.to[r] = encode_frames(frames);
    }
    (void)member;
    return o;
  }

 private:
  ExhaustivePlan plan_;
};

/// Canned phase-king interference patterns used where full bit enumeration
/// would blow up the grid. Actions as in ExhaustivePlan.
inline std::vector<std::vector<std::uint8_t>> canned_pk_pattern(int id, int pk_rounds, int n) {
  std::vector<std::vector<std::uint8_t>> out(pk_rounds, std::vector<std::uint8_t>(n, 0));
  for (int r = 0; r < pk_rounds; ++r)
    for (int p = 0; p < n; ++p) {
      switch (id % 8) {
        case 0: out[r][p] = 0; break;                       // silent
        case 1: out[r][p] = 1; break;                       // all bit 0
        case 2: out[r][p] = 2; break;                       // all bit 1
        case 3: out[r][p] = p + 1 <= n / 2 ? 1 : 2; break;  // split low 0 / high 1
        case 4: out[r][p] = p + 1 <= n / 2 ? 2 : 1; break;  // split reversed
        case 5: out[r][p] = r % 2 == 0 ? 1 : 2; break;      // alternate by round
        case 6: out[r][p] = r % 3 == 0 ? 1 : 2; break;      // 0 on votes, 1 elsewhere
        case 7: out[r][p] = r % 3 == 0 ? 2 : 1; break;      // 1 on votes, 0 elsewhere
      }
    }
  return out;
}

/// Mixed-radix decode of one strategy from the restricted value grid. The
/// grid is {silent, lo-1, lo, mid, hi, hi+1} relative to the honest inputs;
/// stages are the outer broadcast splits, the weak-agreement value splits,
/// the perplexity-claim subsets and a canned phase-king pattern.
inline ExhaustivePlan decode_exhaustive_plan(std::uint64_t index, int n, int f,
                                             const std::vector<std::optional<Value>>& grid) {
  ExhaustivePlan plan;
  const auto g = static_cast<std::uint64_t>(grid.size());
  plan.r0.resize(n);
  for (int r = 0; r < n; ++r) {
    plan.r0[r] = grid[index % g];
    index /= g;
  }
  plan.tc.resize(n);
  for (int r = 0; r < n; ++r) {
    plan.tc[r] = grid[index % g];
    index /= g;
  }
  plan.claim_mask = static_cast<std::uint32_t>(index % (1ull << n));
  index /= 1ull << n;
  plan.pk = canned_pk_pattern(static_cast<int>(index % 8), phase_king_rounds(f), n);
  return plan;
}

inline std::vector<std::optional<Value>> exhaustive_grid(std::int64_t lo, std::int64_t mid,
                                                         std::int64_t hi) {
  return {std::nullopt,        Value::of(lo - 1), Value::of(lo),
          Value::of(mid),      Value::of(hi),     Value::of(hi + 1)};
}

/// Strategy count for a full decode_exhaustive_plan walk at n processes.
inline std::uint64_t exhaustive_plan_count(int n, std::uint64_t grid_size) {
  std::uint64_t total = 1;
  for (int i = 0; i < 2 * n; ++i) total *= grid_size;
  return total * (1ull << n) * 8;
}

/// Builds the adversary described by a scenario. Null when no Byzantine
/// members are configured.
inline std::unique_ptr<AdversaryStrategy> make_strategy(const ByzantineStrategyCfg& cfg, int n,
                                                        int f) {
  switch (cfg.kind) {
    case ByzantineStrategyCfg::Kind::None:
      return nullptr;
    case ByzantineStrategyCfg::Kind::Silent:
      return std::make_unique<SilentStrategy>();
    case ByzantineStrategyCfg::Kind::Random:
      return std::make_unique<RandomStrategy>();
    case ByzantineStrategyCfg::Kind::EquivocateSplit:
      return std::make_unique<EquivocateSplitStrategy>(cfg.split_a, cfg.split_b);
    case ByzantineStrategyCfg::Kind::Collude:
      return std::make_unique<ColludeStrategy>(cfg.target);
    case ByzantineStrategyCfg::Kind::Exhaustive:
      return std::make_unique<PlanStrategy>(
          decode_exhaustive_plan(cfg.strategy_index, n, f, exhaustive_grid(0, 5, 9)));
  }
  return nullptr;
}

}  // namespace pulsebft
