#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pulsebft/faults.hpp"
#include "pulsebft/simulation.hpp"

namespace pulsebft {

struct ExhaustiveReport {
  std::uint64_t runs = 0;
  std::uint64_t violations = 0;
  std::string first_violation;

  void record(const std::string& what) {
    ++violations;
    if (first_violation.empty()) first_violation = what;
  }
};

/// Small-scope enumeration at n=4, f=1 (process 4 Byzantine). The adversary's
/// unrestricted message space is astronomically large, so the search is
/// layered: each protocol layer gets the full cross product of per-recipient
/// choices over its own restricted grid, while the layers around it run a
/// canned catalog. A bound > 0 caps each walk for quick smoke runs.

namespace exhaustive_detail {

constexpr int kN = 4;
constexpr int kF = 1;
constexpr ProcessId kByz = 4;

inline bool honest_id(int i) { return i + 1 != kByz; }

}  // namespace exhaustive_detail

/// Binary layer: every per-round per-recipient bit choice of the adversary
/// across all 3*(f+1) rounds (2^18 plans), for each honest input pattern;
/// plus every recipient-uniform plan over {silent, 0, 1}. Checks agreement
/// always and validity under unanimous honest inputs.
inline ExhaustiveReport exhaustive_binary_campaign(std::uint64_t bound = 0) {
  using namespace exhaustive_detail;
  ExhaustiveReport rep;
  const int rounds = phase_king_rounds(kF);

  auto run_one = [&](const ExhaustivePlan& plan, unsigned input_bits, const char* tag,
                     std::uint64_t index) {
    std::vector<bool> inputs;
    for (int i = 0; i < kN; ++i) inputs.push_back((input_bits >> i) & 1);
    PlanStrategy strategy(plan);
    ProtocolRun run = run_single_binary(kN, kF, inputs, {kByz}, &strategy);
    ++rep.runs;
    std::optional<bool> agreed;
    bool all_same_input = true;
    for (int i = 1; i < kN; ++i)
      if (honest_id(i) && inputs[i] != inputs[0]) all_same_input = false;
    for (int i = 0; i < kN; ++i) {
      if (!honest_id(i)) continue;
      if (!run.bits[i]) {
        rep.record(std::string(tag) + ": missing decision at index " + std::to_string(index));
        return;
      }
      if (!agreed) {
        agreed = *run.bits[i];
      } else if (*agreed != *run.bits[i]) {
        rep.record(std::string(tag) + ": disagreement at index " + std::to_string(index));
        return;
      }
    }
    if (all_same_input && agreed && *agreed != inputs[0])
      rep.record(std::string(tag) + ": validity broken at index " + std::to_string(index));
  };

  // full bit plans: 3 honest recipients x 6 rounds
  const std::uint64_t full = 1ull << (3 * rounds);
  for (unsigned input_bits = 0; input_bits < 8; ++input_bits) {
    for (std::uint64_t plan_bits = 0; plan_bits < full; ++plan_bits) {
      if (bound && rep.runs >= bound) return rep;
      ExhaustivePlan plan;
      plan.pk.assign(rounds, std::vector<std::uint8_t>(kN, 0));
      for (int r = 0; r < rounds; ++r)
        for (int rcpt = 0; rcpt < 3; ++rcpt)
          plan.pk[r][rcpt] = ((plan_bits >> (r * 3 + rcpt)) & 1) ? 2 : 1;
      run_one(plan, input_bits, "pk-full", plan_bits);
    }
  }

  // recipient-uniform plans with silence: {silent,0,1}^rounds
  std::uint64_t uniform_total = 1;
  for (int i = 0; i < rounds; ++i) uniform_total *= 3;
  for (unsigned input_bits = 0; input_bits < 8; ++input_bits) {
    for (std::uint64_t idx = 0; idx < uniform_total; ++idx) {
      if (bound && rep.runs >= bound) return rep;
      ExhaustivePlan plan;
      plan.pk.assign(rounds, std::vector<std::uint8_t>(kN, 0));
      std::uint64_t rest = idx;
      for (int r = 0; r < rounds; ++r) {
        const auto act = static_cast<std::uint8_t>(rest % 3);
        rest /= 3;
        for (int rcpt = 0; rcpt < kN; ++rcpt) plan.pk[r][rcpt] = act;
      }
      run_one(plan, input_bits, "pk-uniform", idx);
    }
  }
  return rep;
}

/// Weak-agreement layer: honest input patterns over {1,5,9}, adversary
/// first-round splits over the full grid, every perplexity-claim subset, and
/// the canned phase-king catalog. Checks consistency always and validity
/// under unanimous honest inputs.
inline ExhaustiveReport exhaustive_weak_campaign(std::uint64_t bound = 0) {
  using namespace exhaustive_detail;
  ExhaustiveReport rep;
  const std::vector<std::int64_t> honest_vals = {1, 5, 9};
  const std::vector<std::optional<Value>> grid = exhaustive_grid(1, 5, 9);

  for (int h0 = 0; h0 < 3; ++h0)
    for (int h1 = 0; h1 < 3; ++h1)
      for (int h2 = 0; h2 < 3; ++h2) {
        const std::vector<Value> inputs = {
            Value::of(honest_vals[h0]), Value::of(honest_vals[h1]), Value::of(honest_vals[h2]),
            Value::of(0)};
        const bool unanimous = h0 == h1 && h1 == h2;
        for (std::uint64_t split = 0; split < 216; ++split)
          for (std::uint32_t claims = 0; claims < 8; ++claims)
            for (int pk = 0; pk < 8; ++pk) {
              if (bound && rep.runs >= bound) return rep;
              ExhaustivePlan plan;
              plan.tc.resize(kN);
              std::uint64_t rest = split;
              for (int r = 0; r < 3; ++r) {
                plan.tc[r] = grid[rest % grid.size()];
                rest /= grid.size();
              }
              plan.claim_mask = claims;
              plan.pk = canned_pk_pattern(pk, phase_king_rounds(kF), kN);
              PlanStrategy strategy(plan);
              ProtocolRun run = run_single_weak(kN, kF, inputs, {kByz}, &strategy);
              ++rep.runs;
              std::optional<Value> agreed;
              bool bad = false;
              for (int i = 0; i < kN && !bad; ++i) {
                if (!honest_id(i)) continue;
                if (!run.decisions[i]) {
                  bad = true;
                } else if (!agreed) {
                  agreed = *run.decisions[i];
                } else if (*agreed != *run.decisions[i]) {
                  bad = true;
                }
              }
              if (bad) {
                std::ostringstream d;
                d << "weak: consistency broken at split=" << split << " claims=" << claims
                  << " pk=" << pk;
                rep.record(d.str());
              } else if (unanimous && *agreed != inputs[0]) {
                std::ostringstream d;
                d << "weak: unanimity validity broken at split=" << split
                  << " claims=" << claims << " pk=" << pk;
                rep.record(d.str());
              }
            }
      }
  return rep;
}

/// Full-protocol layer: the adversary's outer-broadcast splits get the whole
/// grid while its in-protocol behaviour runs a catalog (mirror the split,
/// silence, push low, push high; claims none/all; phase-king all-0/all-1).
/// Checks consistency, no bottom, and the honest input interval.
inline ExhaustiveReport exhaustive_mba_campaign(std::uint64_t bound = 0) {
  using namespace exhaustive_detail;
  ExhaustiveReport rep;
  const std::vector<std::vector<std::int64_t>> honest_sets = {{3, 5, 7}, {5, 5, 5}, {3, 3, 7}};
  const std::vector<std::optional<Value>> grid = exhaustive_grid(3, 5, 7);

  for (const auto& hs : honest_sets) {
    const std::vector<Value> inputs = {Value::of(hs[0]), Value::of(hs[1]), Value::of(hs[2]),
                                       Value::of(100)};
    const std::int64_t lo = std::min({hs[0], hs[1], hs[2]});
    const std::int64_t hi = std::max({hs[0], hs[1], hs[2]});
    for (std::uint64_t split = 0; split < 216; ++split)
      for (int behaviour = 0; behaviour < 4; ++behaviour)
        for (int claims = 0; claims < 2; ++claims)
          for (int pk = 1; pk <= 2; ++pk) {
            if (bound && rep.runs >= bound) return rep;
            ExhaustivePlan plan;
            plan.r0.resize(kN);
            std::uint64_t rest = split;
            for (int r = 0; r < 3; ++r) {
              plan.r0[r] = grid[rest % grid.size()];
              rest /= grid.size();
            }
            plan.tc.resize(kN);
            for (int r = 0; r < kN; ++r) {
              switch (behaviour) {
                case 0: plan.tc[r] = r < 3 ? plan.r0[r] : std::nullopt; break;  // mirror
                case 1: plan.tc[r] = std::nullopt; break;                       // silent
                case 2: plan.tc[r] = Value::of(lo - 1); break;
                default: plan.tc[r] = Value::of(hi + 1); break;
              }
            }
            plan.claim_mask = claims ? 0xf : 0;
            plan.pk = canned_pk_pattern(pk, phase_king_rounds(kF), kN);
            PlanStrategy strategy(plan);
            SelectParams sel;
            ProtocolRun run = run_single_mba(kN, kF, inputs, {kByz}, &strategy, sel);
            ++rep.runs;
            std::optional<Value> agreed;
            bool bad = false;
            for (int i = 0; i < kN && !bad; ++i) {
              if (!honest_id(i)) continue;
              if (!run.decisions[i] || run.decisions[i]->is_bottom()) {
                bad = true;
              } else if (!agreed) {
                agreed = *run.decisions[i];
              } else if (*agreed != *run.decisions[i]) {
                bad = true;
              }
            }
            std::ostringstream where;
            where << "mba: split=" << split << " behaviour=" << behaviour
                  << " claims=" << claims << " pk=" << pk;
            if (bad) {
              rep.record("consistency broken or bottom decided, " + where.str());
            } else if (agreed->payload() < lo || agreed->payload() > hi) {
              rep.record("interval validity broken, " + where.str());
            }
          }
  }
  return rep;
}

}  // namespace pulsebft
