#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pulsebft/checks.hpp"
#include "pulsebft/scenario.hpp"
#include "pulsebft/simulation.hpp"

namespace pulsebft {

struct PropertyStats {
  std::int64_t checked = 0;
  std::int64_t violations = 0;
};

/// Aggregate of one seed sweep. Violations keep the (scenario, seed) pair
/// that reproduces them; reports contain nothing nondeterministic, so two
/// sweeps of the same base and range serialize byte for byte.
struct CampaignReport {
  std::string scenario_json;  // canonical base scenario (seed field varies per run)
  std::uint64_t seed_lo = 0, seed_hi = 0;
  std::int64_t runs = 0;
  std::int64_t run_errors = 0;
  std::vector<std::pair<std::string, PropertyStats>> properties;  // fixed order
  std::vector<Violation> samples;                                 // capped
  std::vector<std::string> error_samples;                         // capped
  // benign-transient ledger
  std::int64_t benign_pulses = 0;
  std::int64_t pred_safe_obs_safe = 0;
  std::int64_t pred_safe_obs_viol = 0;  // nonzero would contradict the counting argument
  std::int64_t pred_unsafe_obs_safe = 0;
  std::int64_t pred_unsafe_obs_viol = 0;
  std::int64_t obs_na = 0;
  std::map<int, std::int64_t> w_hist;

  static constexpr std::size_t kSampleCap = 50;

  std::int64_t total_violations() const {
    std::int64_t total = 0;
    for (const auto& [name, stats] : properties) total += stats.violations;
    return total;
  }
};

/// Runs |seeds| independent simulations of the base scenario and checks every
/// invariant each pulse. Seeds run in ascending order; the aggregation is a
/// pure fold, so the report does not depend on how runs would be scheduled.
inline CampaignReport run_campaign(const ValidatedConfig& base, std::uint64_t seed_lo,
                                   std::uint64_t seed_hi) {
  CampaignReport rep;
  rep.scenario_json = scenario_to_json(base.cfg).dump();
  rep.seed_lo = seed_lo;
  rep.seed_hi = seed_hi;
  for (const std::string& p : check_properties()) rep.properties.push_back({p, {}});

  for (std::uint64_t seed = seed_lo; seed <= seed_hi; ++seed) {
    ValidatedConfig vc = base;
    vc.cfg.seed = seed;
    ++rep.runs;
    SimResult sim;
    try {
      sim = run_simulation(vc);
    } catch (const std::exception& e) {
      ++rep.run_errors;
      if (rep.error_samples.size() < CampaignReport::kSampleCap)
        rep.error_samples.push_back("seed " + std::to_string(seed) + ": " + e.what());
      continue;
    }
    CheckOutcome outcome = check_sim(sim, vc, seed);
    for (auto& [name, stats] : rep.properties) {
      stats.checked += outcome.checked[name];
      for (const Violation& v : outcome.violations)
        if (v.property == name) ++stats.violations;
    }
    for (const Violation& v : outcome.violations)
      if (rep.samples.size() < CampaignReport::kSampleCap) rep.samples.push_back(v);
    for (const BenignRow& row : outcome.benign) {
      ++rep.benign_pulses;
      ++rep.w_hist[row.w];
      if (!row.observed) {
        ++rep.obs_na;
      } else if (row.predicted) {
        ++(*row.observed ? rep.pred_safe_obs_safe : rep.pred_safe_obs_viol);
      } else {
        ++(*row.observed ? rep.pred_unsafe_obs_safe : rep.pred_unsafe_obs_viol);
      }
    }
  }
  return rep;
}

inline nlohmann::ordered_json report_to_json(const CampaignReport& r) {
  using Json = nlohmann::ordered_json;
  Json j;
  j["scenario"] = Json::parse(r.scenario_json);
  j["seeds"] = {{"lo", r.seed_lo}, {"hi", r.seed_hi}};
  j["runs"] = r.runs;
  j["run_errors"] = r.run_errors;
  Json props;
  for (const auto& [name, stats] : r.properties)
    props[name] = {{"checked", stats.checked}, {"violations", stats.violations}};
  j["properties"] = std::move(props);
  j["total_violations"] = r.total_violations();
  Json samples = Json::array();
  for (const Violation& v : r.samples)
    samples.push_back({{"property", v.property},
                       {"seed", v.seed},
                       {"pulse", v.pulse},
                       {"detail", v.detail}});
  j["violation_samples"] = std::move(samples);
  j["error_samples"] = r.error_samples;
  Json benign;
  benign["pulses"] = r.benign_pulses;
  benign["pred_safe_obs_safe"] = r.pred_safe_obs_safe;
  benign["pred_safe_obs_viol"] = r.pred_safe_obs_viol;
  benign["pred_unsafe_obs_safe"] = r.pred_unsafe_obs_safe;
  benign["pred_unsafe_obs_viol"] = r.pred_unsafe_obs_viol;
  benign["obs_na"] = r.obs_na;
  Json hist;
  for (const auto& [w, count] : r.w_hist) hist[std::to_string(w)] = count;
  benign["w_hist"] = std::move(hist);
  j["benign"] = std::move(benign);
  return j;
}

enum class ReportFormat { Text, JsonFormat };

/// Stable-order serialization; the JSON form is machine-diffable and the
/// text form prints the same numbers for people.
inline std::string emit_report(const CampaignReport& r, ReportFormat format) {
  if (format == ReportFormat::JsonFormat) return report_to_json(r).dump(2) + "\n";
  std::ostringstream out;
  out << "campaign: seeds " << r.seed_lo << ".." << r.seed_hi << ", " << r.runs << " runs";
  if (r.run_errors > 0) out << " (" << r.run_errors << " aborted)";
  out << "\n";
  for (const auto& [name, stats] : r.properties)
    out << "  " << name << ": " << stats.violations << " violations / " << stats.checked
        << " checked\n";
  out << "  total violations: " << r.total_violations() << "\n";
  if (!r.samples.empty()) {
    out << "violations (first " << r.samples.size() << "):\n";
    for (const Violation& v : r.samples)
      out << "  [" << v.property << "] seed=" << v.seed << " pulse=" << v.pulse << " "
          << v.detail << "\n";
  }
  for (const std::string& e : r.error_samples) out << "  [aborted] " << e << "\n";
  if (r.benign_pulses > 0) {
    out << "benign ledger over " << r.benign_pulses << " pulses:\n";
    out << "  predicted safe:   " << r.pred_safe_obs_safe << " held, " << r.pred_safe_obs_viol
        << " violated\n";
    out << "  predicted unsafe: " << r.pred_unsafe_obs_safe << " held, "
        << r.pred_unsafe_obs_viol << " violated\n";
    out << "  not evaluable (divergent entry): " << r.obs_na << "\n";
    out << "  w histogram:";
    for (const auto& [w, count] : r.w_hist) out << " " << w << ":" << count;
    out << "\n";
  }
  return out.str();
}

}  // namespace pulsebft
