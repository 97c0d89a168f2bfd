// Acceptance suite: one test per advertised guarantee, each printing a
// single PASS/FAIL line with the numbers behind it. Everything runs at desk
// scale with fixed seeds.

#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <string>

#include "pulsebft/benign.hpp"
#include "pulsebft/campaign.hpp"
#include "pulsebft/exhaustive.hpp"
#include "pulsebft/scenario.hpp"
#include "pulsebft/simulation.hpp"
#include "select_oracle.h"

namespace pulsebft {
namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, bool ok, const std::string& detail, long long ms) {
  std::printf("[%s] criterion %d: %s (%lld ms)\n", ok ? "PASS" : "FAIL", criterion,
              detail.c_str(), ms);
  std::fflush(stdout);
  EXPECT_TRUE(ok) << "criterion " << criterion << ": " << detail;
}

std::int64_t property_violations(const CampaignReport& rep, const std::string& name) {
  for (const auto& [prop, stats] : rep.properties)
    if (prop == name) return stats.violations;
  return -1;
}

std::int64_t property_checked(const CampaignReport& rep, const std::string& name) {
  for (const auto& [prop, stats] : rep.properties)
    if (prop == name) return stats.checked;
  return -1;
}

ValidatedConfig grid_scenario(int n, ByzantineStrategyCfg::Kind kind) {
  ScenarioConfig cfg;
  cfg.bounds.n = n;
  cfg.bounds.f_max = (n - 1) / 3;
  cfg.pulses = 1;
  cfg.machine = StateMachineSpec::counter(2000);
  cfg.initial_state = 5;
  cfg.inputs.kind = InputSpec::Kind::Uniform;
  cfg.inputs.lo = 0;
  cfg.inputs.hi = 100;
  cfg.byzantine.kind = kind;
  for (int p = n - cfg.bounds.f_max + 1; p <= n; ++p) cfg.byzantine.members.insert(p);
  cfg.byzantine.target = Value::of(1000);       // collude: well outside the input range
  cfg.byzantine.split_a = Value::of(-50);       // equivocate: below and above the range
  cfg.byzantine.split_b = Value::of(500);
  return validate_config(cfg);
}

const char* kind_name(ByzantineStrategyCfg::Kind kind) {
  switch (kind) {
    case ByzantineStrategyCfg::Kind::Silent: return "silent";
    case ByzantineStrategyCfg::Kind::Random: return "random";
    case ByzantineStrategyCfg::Kind::EquivocateSplit: return "equivocate-split";
    case ByzantineStrategyCfg::Kind::Collude: return "collude";
    default: return "?";
  }
}

// Criteria 1, 2 and the campaign half of 8 share one sweep: every catalog
// adversary at n in {4,7,10,13} with f = floor((n-1)/3), 500 seeds each.
struct GridOutcome {
  std::int64_t runs = 0;
  std::int64_t consistency = 0;
  std::int64_t interval = 0;
  std::int64_t rounds = 0;
  std::int64_t errors = 0;
  std::string detail;
};

const GridOutcome& grid_outcome() {
  static const GridOutcome out = [] {
    GridOutcome o;
    for (int n : {4, 7, 10, 13})
      for (auto kind :
           {ByzantineStrategyCfg::Kind::Silent, ByzantineStrategyCfg::Kind::Random,
            ByzantineStrategyCfg::Kind::EquivocateSplit, ByzantineStrategyCfg::Kind::Collude}) {
        const CampaignReport rep = run_campaign(grid_scenario(n, kind), 0, 499);
        o.runs += rep.runs;
        o.consistency += property_violations(rep, "consistency");
        o.interval += property_violations(rep, "interval_validity");
        o.rounds += property_violations(rep, "round_exactness");
        o.errors += rep.run_errors;
        if (rep.total_violations() > 0 && o.detail.empty())
          o.detail = std::string("first failures at n=") + std::to_string(n) + " " +
                     kind_name(kind);
      }
    return o;
  }();
  return out;
}

TEST(Acceptance, C1_Consistency) {
  Stopwatch sw;
  const GridOutcome& o = grid_outcome();
  std::string detail = std::to_string(o.runs) +
                       " runs across n in {4,7,10,13} x 4 adversaries x 500 seeds, " +
                       std::to_string(o.consistency) + " consistency violations, " +
                       std::to_string(o.errors) + " aborted runs";
  if (!o.detail.empty()) detail += "; " + o.detail;
  report(1, o.consistency == 0 && o.errors == 0, detail, sw.ms());
}

TEST(Acceptance, C2_IntervalValidity) {
  Stopwatch sw;
  const GridOutcome& o = grid_outcome();
  report(2, o.interval == 0,
         "same sweep, " + std::to_string(o.interval) + " interval violations", sw.ms());
}

TEST(Acceptance, C3_ExhaustiveSmallScope) {
  Stopwatch sw;
  const ExhaustiveReport binary = exhaustive_binary_campaign();
  const ExhaustiveReport weak = exhaustive_weak_campaign();
  const ExhaustiveReport mba = exhaustive_mba_campaign();
  const std::uint64_t runs = binary.runs + weak.runs + mba.runs;
  const std::uint64_t bad = binary.violations + weak.violations + mba.violations;
  std::string detail = "n=4 f=1 enumeration: " + std::to_string(binary.runs) + " binary + " +
                       std::to_string(weak.runs) + " weak + " + std::to_string(mba.runs) +
                       " full runs, " + std::to_string(bad) + " violations";
  if (bad > 0)
    detail += "; first: " +
              (binary.violations       ? binary.first_violation
               : weak.violations != 0u ? weak.first_violation
                                       : mba.first_violation);
  report(3, bad == 0, detail, sw.ms());
}

TEST(Acceptance, C4_SelectValueBruteForce) {
  Stopwatch sw;
  const std::vector<Value> symbols = {Value::bottom(), Value::of(0), Value::of(1), Value::of(2),
                                      Value::of(3)};
  std::uint64_t cases = 0, mismatches = 0;
  for (int len = 1; len <= 6; ++len) {
    std::uint64_t total = 1;
    for (int i = 0; i < len; ++i) total *= symbols.size();
    for (std::uint64_t code = 0; code < total; ++code) {
      std::vector<Value> a;
      std::uint64_t rest = code;
      for (int i = 0; i < len; ++i) {
        a.push_back(symbols[rest % symbols.size()]);
        rest /= symbols.size();
      }
      bool all_bottom = true;
      for (Value v : a)
        if (!v.is_bottom()) all_bottom = false;
      if (all_bottom) continue;
      for (int alpha : {0, 1})
        for (ThresholdBase base : {ThresholdBase::K, ThresholdBase::N}) {
          SelectParams sel;
          sel.alpha = alpha;
          sel.base = base;
          ++cases;
          if (select_value(a, sel) != oracle_select(a, alpha, base)) ++mismatches;
        }
    }
  }
  report(4, mismatches == 0,
         "k<=6 over {bottom,0,1,2,3}, alpha in {0,1}, both bases: " + std::to_string(cases) +
             " cases, " + std::to_string(mismatches) + " mismatches",
         sw.ms());
}

ValidatedConfig lemma_scenario(int x) {
  ScenarioConfig cfg;
  cfg.bounds.n = 12;
  cfg.bounds.f_max = 3;
  cfg.bounds.r_max = 1;
  cfg.bounds.alpha = 1;
  cfg.pulses = 20;
  cfg.machine = StateMachineSpec::counter(1000000);
  cfg.initial_state = 5;
  cfg.inputs.kind = InputSpec::Kind::Fixed;
  cfg.inputs.fixed = 1;
  cfg.byzantine.kind = ByzantineStrategyCfg::Kind::Collude;
  cfg.byzantine.members = {10, 11, 12};
  cfg.byzantine.target = Value::of(0);
  cfg.transients.kind = TransientModelCfg::Kind::Malicious;
  cfg.transients.target = Value::of(0);
  cfg.transients.per_pulse = x;
  return validate_config(cfg);
}

TEST(Acceptance, C5_StrongStateValidityAndSharpness) {
  Stopwatch sw;
  // within bounds: x <= r_max = 1, alpha = 1; preservation must be total
  const CampaignReport in_bounds = run_campaign(lemma_scenario(1), 0, 199);
  const std::int64_t checked = property_checked(in_bounds, "strong_state_validity");
  const std::int64_t viol = property_violations(in_bounds, "strong_state_validity");
  const bool part_a = checked == 200 * 20 && viol == 0;

  // past the threshold: f + x = 6 >= floor(n/3)+1+alpha, colluders joining
  // the transient value; at least one pulse must break
  const CampaignReport beyond = run_campaign(lemma_scenario(3), 0, 19);
  const std::int64_t sharp = property_violations(beyond, "strong_state_validity");
  const bool part_b = sharp >= 1;

  report(5, part_a && part_b,
         "x=1: " + std::to_string(viol) + " violations in " + std::to_string(checked) +
             " pulses; x=3 sweep: " + std::to_string(sharp) +
             " violations (threshold sharpness)",
         sw.ms());
}

ValidatedConfig stabilization_scenario(int n) {
  ScenarioConfig cfg;
  cfg.bounds.n = n;
  cfg.bounds.f_max = (n - 1) / 3;
  cfg.bounds.r_max = std::max(0, transient_bound(n));
  cfg.bounds.alpha = n >= 7 ? 1 : 0;
  cfg.pulses = 5;
  cfg.machine = StateMachineSpec::counter(50);
  cfg.self_stabilization = true;
  cfg.inputs.kind = InputSpec::Kind::Uniform;
  cfg.inputs.lo = 0;
  cfg.inputs.hi = 20;
  cfg.byzantine.kind = ByzantineStrategyCfg::Kind::Collude;
  for (int p = n - cfg.bounds.f_max + 1; p <= n; ++p) cfg.byzantine.members.insert(p);
  cfg.byzantine.target = Value::of(100);
  if (cfg.bounds.r_max > 0) {
    cfg.transients.kind = TransientModelCfg::Kind::Malicious;
    cfg.transients.target = Value::of(45);
    cfg.transients.per_pulse = cfg.bounds.r_max;
  }
  return validate_config(cfg);
}

TEST(Acceptance, C6_SelfStabilization) {
  Stopwatch sw;
  std::int64_t violations = 0, strong_checked = 0, runs = 0;
  for (int n : {4, 7}) {
    const CampaignReport rep = run_campaign(stabilization_scenario(n), 0, 199);
    violations += rep.total_violations() + rep.run_errors;
    strong_checked += property_checked(rep, "strong_state_validity");
    runs += rep.runs;
  }
  // arbitrary starts leave pulse 1 without a common entry state, so the
  // strong predicate must have fired on every later pulse of every run
  const bool coverage = strong_checked >= runs * 4;
  report(6, violations == 0 && coverage,
         std::to_string(runs) + " arbitrary-start runs (n=4, n=7), " +
             std::to_string(violations) + " legitimacy violations from the second pulse on, " +
             std::to_string(strong_checked) + " strong-state checks",
         sw.ms());
}

TEST(Acceptance, C7_BenignTransientTheorem) {
  Stopwatch sw;
  const BenignEstimate big_z = benign_monte_carlo(12, 3, 1, 4, 1ull << 16, 10000, 2718);
  const BenignEstimate small_z = benign_monte_carlo(12, 3, 1, 4, 2, 10000, 2718);
  const bool ok = big_z.rate >= 0.99 && small_z.rate < 0.99;
  char ci[96];
  std::snprintf(ci, sizeof ci, " [95%% CI %.4f-%.4f and %.4f-%.4f]", big_z.ci_lo, big_z.ci_hi,
                small_z.ci_lo, small_z.ci_hi);
  std::string detail = "n=12 f=3 alpha=1 x=4: rate(z=2^16)=" + std::to_string(big_z.rate) +
                       " (need >= 0.99), rate(z=2)=" + std::to_string(small_z.rate) +
                       " (need < 0.99)" + ci;
  if (big_z.rate < 0.99)
    detail += "; note: with these parameters the most-common threshold floor(n/3)+1+alpha = 6 "
              "exceeds the n-f-x = 5 uncorrupted honest entries, so preservation can only come "
              "from a lucky median position - the z bracketing holds at alpha=0 (see diagnostics)";
  report(7, ok, detail, sw.ms());
  // The same experiment at the margin setting the uncorrupted-majority
  // counting actually supports.
  for (int alpha : {0, 1})
    for (std::uint64_t z : {2ull, 1ull << 16}) {
      const BenignEstimate est = benign_monte_carlo(12, 3, alpha, 4, z, 10000, 2718);
      std::printf("    benign diagnostic: alpha=%d z=%llu rate=%.4f w-collisions=%llu\n", alpha,
                  static_cast<unsigned long long>(z), est.rate,
                  static_cast<unsigned long long>(est.trials -
                                                  (est.w_hist.count(1) ? est.w_hist.at(1) : 0)));
    }
}

TEST(Acceptance, C8_RoundBudgetExactness) {
  Stopwatch sw;
  // agreement runs decide in exactly 3 + 3*(f+1) rounds
  bool mba_exact = true;
  for (int f : {0, 1, 2, 3, 4}) {
    const int n = 3 * f + 4;
    std::vector<Value> inputs;
    for (int i = 0; i < n; ++i) inputs.push_back(Value::of(i % 5));
    const ProtocolRun run = run_single_mba(n, f, inputs, {}, nullptr, SelectParams{});
    for (int i = 0; i < n; ++i)
      if (run.decide_round[i] != 3 + 3 * (f + 1) - 1) mba_exact = false;
  }
  // pulses occupy exactly round_budget(n, f) rounds: the last trace round of
  // a multi-pulse run sits at pulses*b - 1
  ScenarioConfig cfg;
  cfg.bounds.n = 7;
  cfg.bounds.f_max = 2;
  cfg.pulses = 3;
  cfg.machine = StateMachineSpec::counter(10);
  cfg.trace_verbosity = 1;
  const SimResult sim = run_simulation(validate_config(cfg));
  std::int64_t max_round = -1;
  for (const TraceEvent& e : sim.trace.events()) max_round = std::max(max_round, e.round);
  const bool pulse_exact = max_round == 3 * round_budget(7, 2) - 1;
  // and the seed sweeps above must not have logged a single schedule slip
  const GridOutcome& o = grid_outcome();
  report(8, mba_exact && pulse_exact && o.rounds == 0,
         "agreement rounds = 3+3(f+1) for f in 0..4; pulse rounds = round_budget; " +
             std::to_string(o.rounds) + " schedule violations across " +
             std::to_string(o.runs) + " campaign runs",
         sw.ms());
}

TEST(Acceptance, C9_Determinism) {
  Stopwatch sw;
  ScenarioConfig cfg;
  cfg.bounds.n = 7;
  cfg.bounds.f_max = 2;
  cfg.bounds.r_max = 1;
  cfg.pulses = 3;
  cfg.seed = 31337;
  cfg.machine = StateMachineSpec::counter(100);
  cfg.inputs.kind = InputSpec::Kind::Uniform;
  cfg.inputs.lo = 0;
  cfg.inputs.hi = 50;
  cfg.byzantine.kind = ByzantineStrategyCfg::Kind::Random;
  cfg.byzantine.members = {6, 7};
  cfg.transients.kind = TransientModelCfg::Kind::Uniform;
  cfg.transients.domain = 1 << 10;
  cfg.transients.per_pulse = 1;
  cfg.trace_verbosity = 1;
  const ValidatedConfig vc = validate_config(cfg);

  const std::string trace_a = run_simulation(vc).trace.to_jsonl();
  const std::string trace_b = run_simulation(vc).trace.to_jsonl();
  const std::string report_a =
      emit_report(run_campaign(vc, 0, 19), ReportFormat::JsonFormat);
  const std::string report_b =
      emit_report(run_campaign(vc, 0, 19), ReportFormat::JsonFormat);
  report(9, trace_a == trace_b && report_a == report_b,
         "trace bytes " + std::to_string(trace_a.size()) + "B and report bytes " +
             std::to_string(report_a.size()) + "B identical across reruns",
         sw.ms());
}

}  // namespace
}  // namespace pulsebft

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
