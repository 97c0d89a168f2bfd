#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pulsebft/median_mvba.hpp"
#include "pulsebft/rng.hpp"

namespace pulsebft {

/// One pulse of the benign-transient experiment: the x corrupted replicas
/// draw uniformly from a domain of z values, the Byzantine coalition joins
/// the most popular draw (ties to the smallest, which also wins the decision
/// rule's tie-break against a larger honest state), and everyone else
/// proposes the common state s = z/2.
struct BenignTrial {
  std::int64_t honest_state = 0;
  std::vector<std::int64_t> draws;
  std::int64_t joined = 0;  // y
  int multiplicity = 0;     // w
  std::vector<Value> vector;
};

inline BenignTrial benign_trial(int n, int f, int x, std::uint64_t z, Rng& rng) {
  BenignTrial t;
  t.honest_state = static_cast<std::int64_t>(z / 2);
  std::map<std::int64_t, int> tally;
  for (int i = 0; i < x; ++i) {
    const auto d = static_cast<std::int64_t>(rng.below(z));
    t.draws.push_back(d);
    ++tally[d];
  }
  for (const auto& [val, count] : tally)
    if (count > t.multiplicity) {
      t.joined = val;
      t.multiplicity = count;
    }
  t.vector.reserve(n);
  for (int i = 0; i < n - f - x; ++i) t.vector.push_back(Value::of(t.honest_state));
  for (std::int64_t d : t.draws) t.vector.push_back(Value::of(d));
  for (int i = 0; i < f; ++i) t.vector.push_back(Value::of(x > 0 ? t.joined : t.honest_state));
  return t;
}

struct BenignEstimate {
  std::uint64_t trials = 0;
  std::uint64_t preserved = 0;
  double rate = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // 95% normal-approximation interval
  std::map<int, std::uint64_t> w_hist;

  std::string summary() const {
    std::ostringstream out;
    out << "rate " << rate << " (" << preserved << "/" << trials << "), 95% CI [" << ci_lo
        << ", " << ci_hi << "], w histogram:";
    for (const auto& [w, count] : w_hist) out << " " << w << ":" << count;
    return out.str();
  }
};

/// Estimates how often the state agreement still returns the honest common
/// state when x replicas are hit by uniformly distributed transients and the
/// Byzantine coalition piles onto the most popular corrupted value. Exact
/// per trial: broadcasts are uniform under this fault model, so every
/// agreement instance settles on the broadcast value and the decision is
/// select_value over the constructed vector.
inline BenignEstimate benign_monte_carlo(int n, int f, int alpha, int x, std::uint64_t z,
                                         std::uint64_t trials, std::uint64_t seed,
                                         ThresholdBase base = ThresholdBase::K) {
  if (n < 1 || f < 0 || x < 0 || z < 1) throw ConfigError("benign experiment: bad parameters");
  if (f + x > n) throw ConfigError("benign experiment: f + x exceeds n");
  BenignEstimate est;
  est.trials = trials;
  Rng rng(seed);
  SelectParams sel;
  sel.alpha = alpha;
  sel.base = base;
  for (std::uint64_t i = 0; i < trials; ++i) {
    BenignTrial t = benign_trial(n, f, x, z, rng);
    ++est.w_hist[t.multiplicity];
    if (select_value(t.vector, sel) == Value::of(t.honest_state)) ++est.preserved;
  }
  if (trials > 0) {
    est.rate = static_cast<double>(est.preserved) / static_cast<double>(trials);
    const double half = 1.96 * std::sqrt(est.rate * (1.0 - est.rate) /
                                         static_cast<double>(trials));
    est.ci_lo = std::max(0.0, est.rate - half);
    est.ci_hi = std::min(1.0, est.rate + half);
  }
  return est;
}

}  // namespace pulsebft
