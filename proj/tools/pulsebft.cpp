// Command-line front end: single runs, seed campaigns, the benign-transient
// Monte Carlo experiment, and trace replay verification.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pulsebft/benign.hpp"
#include "pulsebft/campaign.hpp"
#include "pulsebft/checks.hpp"
#include "pulsebft/scenario.hpp"
#include "pulsebft/simulation.hpp"

namespace {

using namespace pulsebft;

struct CommonFlags {
  std::string format = "text";
  std::string threshold_base;
};

void apply_overrides(ValidatedConfig& vc, const CommonFlags& flags, bool have_seed,
                     std::uint64_t seed, int verbosity) {
  if (!flags.threshold_base.empty()) {
    if (flags.threshold_base != "k" && flags.threshold_base != "n")
      throw ConfigError("--threshold-base must be k or n");
    vc.cfg.threshold_base = flags.threshold_base == "k" ? ThresholdBase::K : ThresholdBase::N;
  }
  if (have_seed) vc.cfg.seed = seed;
  if (verbosity >= 0) vc.cfg.trace_verbosity = verbosity;
  vc = validate_config(vc.cfg);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_warnings(const ValidatedConfig& vc) {
  for (const std::string& w : vc.warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_run(const std::string& path, const CommonFlags& flags, bool have_seed,
            std::uint64_t seed, int verbosity, const std::string& trace_out) {
  ValidatedConfig vc = parse_scenario(path);
  apply_overrides(vc, flags, have_seed, seed, verbosity);
  print_warnings(vc);
  const SimResult sim = run_simulation(vc);
  const CheckOutcome outcome = check_sim(sim, vc, vc.cfg.seed);
  if (!trace_out.empty()) write_file(trace_out, sim.trace.to_jsonl());

  if (flags.format == "json") {
    Json j;
    j["seed"] = vc.cfg.seed;
    Json pulses = Json::array();
    for (const PulseSummary& ps : sim.pulses) {
      Json p;
      p["pulse"] = ps.pulse;
      int honest = 0;
      while (honest < sim.n && sim.byzantine[honest]) ++honest;
      p["agreed_input"] = ps.agreed_input[honest].is_bottom()
                              ? Json(nullptr)
                              : Json(ps.agreed_input[honest].payload());
      p["agreed_state"] = ps.agreed_state[honest].is_bottom()
                              ? Json(nullptr)
                              : Json(ps.agreed_state[honest].payload());
      p["next_state"] = ps.next_state[honest];
      p["corruptions"] = ps.corruptions.size();
      pulses.push_back(std::move(p));
    }
    j["pulses"] = std::move(pulses);
    Json finals = Json::array();
    for (Value v : sim.final_states) finals.push_back(v.payload());
    j["final_states"] = std::move(finals);
    Json viols = Json::array();
    for (const Violation& v : outcome.violations)
      viols.push_back({{"property", v.property}, {"pulse", v.pulse}, {"detail", v.detail}});
    j["violations"] = std::move(viols);
    std::cout << j.dump(2) << "\n";
  } else {
    for (const PulseSummary& ps : sim.pulses) {
      int honest = 0;
      while (honest < sim.n && sim.byzantine[honest]) ++honest;
      std::cout << "pulse " << ps.pulse << ": agreed input "
                << ps.agreed_input[honest].str() << ", agreed state "
                << ps.agreed_state[honest].str() << ", next state " << ps.next_state[honest];
      if (!ps.corruptions.empty()) std::cout << " (" << ps.corruptions.size() << " transient)";
      std::cout << "\n";
    }
    std::cout << "final states:";
    for (Value v : sim.final_states) std::cout << " " << v.str();
    std::cout << "\n";
    if (outcome.violations.empty()) {
      std::cout << "checks: ok\n";
    } else {
      for (const Violation& v : outcome.violations)
        std::cout << "violation [" << v.property << "] pulse " << v.pulse << ": " << v.detail
                  << "\n";
    }
  }
  return outcome.violations.empty() ? 0 : 1;
}

int cmd_campaign(const std::string& path, const CommonFlags& flags, const std::string& seeds,
                 const std::string& report_out) {
  const std::size_t dots = seeds.find("..");
  if (dots == std::string::npos)
    throw ConfigError("--seeds expects the form A..B, got \"" + seeds + "\"");
  const std::uint64_t lo = std::stoull(seeds.substr(0, dots));
  const std::uint64_t hi = std::stoull(seeds.substr(dots + 2));
  if (hi < lo) throw ConfigError("--seeds range is empty");

  ValidatedConfig vc = parse_scenario(path);
  apply_overrides(vc, flags, false, 0, -1);
  print_warnings(vc);
  const auto t0 = std::chrono::steady_clock::now();
  const CampaignReport rep = run_campaign(vc, lo, hi);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
          .count();
  std::cerr << "elapsed: " << ms << " ms\n";
  const std::string text = emit_report(
      rep, flags.format == "json" ? ReportFormat::JsonFormat : ReportFormat::Text);
  if (!report_out.empty())
    write_file(report_out, text);
  else
    std::cout << text;
  return rep.total_violations() == 0 && rep.run_errors == 0 ? 0 : 1;
}

int cmd_benign(int n, int f, int alpha, int x, std::uint64_t z, std::uint64_t trials,
               std::uint64_t seed, const CommonFlags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  const ThresholdBase base =
      flags.threshold_base == "n" ? ThresholdBase::N : ThresholdBase::K;
  const BenignEstimate est = benign_monte_carlo(n, f, alpha, x, z, trials, seed, base);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
          .count();
  std::cerr << "elapsed: " << ms << " ms\n";
  if (flags.format == "json") {
    Json j;
    j["n"] = n;
    j["f"] = f;
    j["alpha"] = alpha;
    j["x"] = x;
    j["z"] = z;
    j["trials"] = est.trials;
    j["preserved"] = est.preserved;
    j["rate"] = est.rate;
    j["ci"] = {est.ci_lo, est.ci_hi};
    Json hist;
    for (const auto& [w, count] : est.w_hist) hist[std::to_string(w)] = count;
    j["w_hist"] = std::move(hist);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "strong-validity preservation " << est.summary() << "\n";
  }
  return 0;
}

int cmd_check(const std::string& trace_path, const std::string& scenario_path,
              const CommonFlags& flags) {
  ValidatedConfig vc = parse_scenario(scenario_path);
  apply_overrides(vc, flags, false, 0, -1);
  const std::string recorded = read_file(trace_path);
  const SimResult sim = run_simulation(vc);
  const std::string replayed = sim.trace.to_jsonl();
  bool ok = true;
  if (replayed != recorded) {
    std::cout << "replay: MISMATCH (recorded trace differs from deterministic re-run)\n";
    ok = false;
  } else {
    std::cout << "replay: byte-identical\n";
  }
  const std::vector<std::string> structure = check_trace_structure(Trace::from_jsonl(recorded));
  for (const std::string& s : structure) std::cout << "structure: " << s << "\n";
  const CheckOutcome outcome = check_sim(sim, vc, vc.cfg.seed);
  for (const Violation& v : outcome.violations)
    std::cout << "violation [" << v.property << "] pulse " << v.pulse << ": " << v.detail
              << "\n";
  if (!structure.empty() || !outcome.violations.empty()) ok = false;
  std::cout << (ok ? "check: ok\n" : "check: FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synchronous-round Byzantine agreement and replication simulator"};
  app.require_subcommand(1);
  CommonFlags flags;

  std::string scenario_path, trace_out, seeds = "0..0", report_out, trace_path;
  std::uint64_t seed = 0;
  bool have_seed = false;
  int verbosity = -1;

  CLI::App* run = app.add_subcommand("run", "run one scenario and print the pulse summary");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--seed", seed, "override the scenario seed")->each([&](const std::string&) {
    have_seed = true;
  });
  run->add_option("--trace-out", trace_out, "write the JSONL trace here");
  run->add_option("--verbosity", verbosity, "trace verbosity override (0 or 1)");
  run->add_option("--format", flags.format, "text | json")->check(CLI::IsMember({"text", "json"}));
  run->add_option("--threshold-base", flags.threshold_base, "k | n");

  CLI::App* campaign = app.add_subcommand("campaign", "sweep seeds and check every invariant");
  campaign->add_option("scenario", scenario_path, "scenario JSON file")->required();
  campaign->add_option("--seeds", seeds, "seed range A..B")->required();
  campaign->add_option("--format", flags.format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));
  campaign->add_option("--out", report_out, "write the report here instead of stdout");
  campaign->add_option("--threshold-base", flags.threshold_base, "k | n");

  CLI::App* benign = app.add_subcommand("benign", "uniform-transient Monte Carlo experiment");
  int bn = 12, bf = 3, balpha = 1, bx = 4;
  std::uint64_t bz = 1ull << 16, btrials = 10000, bseed = 0;
  benign->add_option("--n", bn, "process count")->required();
  benign->add_option("--f", bf, "Byzantine count")->required();
  benign->add_option("--alpha", balpha, "resilience margin")->required();
  benign->add_option("--x", bx, "transients per pulse")->required();
  benign->add_option("--z", bz, "transient value domain size")->required();
  benign->add_option("--trials", btrials, "number of pulses to sample")->required();
  benign->add_option("--seed", bseed, "rng seed");
  benign->add_option("--format", flags.format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));
  benign->add_option("--threshold-base", flags.threshold_base, "k | n");

  CLI::App* check = app.add_subcommand("check", "replay a trace and verify the invariants");
  check->add_option("trace", trace_path, "JSONL trace file")->required();
  check->add_option("--scenario", scenario_path, "scenario that produced the trace")->required();
  check->add_option("--threshold-base", flags.threshold_base, "k | n");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, flags, have_seed, seed, verbosity, trace_out);
    if (campaign->parsed()) return cmd_campaign(scenario_path, flags, seeds, report_out);
    if (benign->parsed())
      return cmd_benign(bn, bf, balpha, bx, bz, btrials, bseed, flags);
    if (check->parsed()) return cmd_check(trace_path, scenario_path, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
