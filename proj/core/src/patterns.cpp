#include "forge/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "forge/config.hpp"
#include "forge/env.hpp"

namespace forge::patterns {

namespace {

void enumerate(const std::vector<double>& candidates, int slots,
               std::vector<double>& prefix,
               std::vector<std::vector<double>>& out) {
  if (slots == 0) {
    out.push_back(prefix);
    return;
  }
  for (double d : candidates) {
    prefix.push_back(d);
    enumerate(candidates, slots - 1, prefix, out);
    prefix.pop_back();
  }
}

std::vector<double> mirror(const std::vector<double>& half, int n_turns) {
  std::vector<double> full(n_turns);
  for (int i = 0; i < n_turns; ++i) {
    full[i] = (i < n_turns - 1 - i) ? half[i] : half[n_turns - 1 - i];
  }
  return full;
}

}  // namespace

double score_pattern(const std::vector<double>& turn_durations,
                     const RunConfig& cfg) {
  RunConfig trial = cfg;
  trial.turn_pattern = turn_durations;
  trial.wh_profile_std = 0.0;  // the search uses the noise-free mean profile
  trial.validate();

  env::ForgingEnv sim(trial);
  sim.reset(env::Mode::kWarmHolding, derive_seed(cfg.seed, "pattern-search"));

  // Constant zones 3-5 power, expressed in action coordinates.
  const double a = std::clamp(2.0 * cfg.pattern_power / cfg.p_max - 1.0,
                              -1.0, 1.0);
  const int hold_steps =
      static_cast<int>(std::llround(cfg.hold_duration / cfg.dt));
  for (int t = 0; t < hold_steps; ++t) {
    sim.step({a, a, a});  // throws on a geometrically infeasible move
    if (!sim.pieces().empty() ||
        sim.line().bars.empty() ||
        sim.line().bars.front().head_pos > cfg.band_length) {
      throw std::runtime_error("score_pattern: bar left the band during hold");
    }
  }

  const std::vector<double>& temps =
      sim.line().bars.front().segment_temps;
  double mad = 0.0;
  for (double t : temps) mad += std::abs(t - cfg.reward.target_temp);
  return mad / static_cast<double>(temps.size());
}

GridSearchResult grid_search(const std::vector<double>& candidate_durations,
                             int n_turns, const RunConfig& cfg,
                             bool palindromic_only) {
  if (candidate_durations.empty() || n_turns < 1) {
    throw std::invalid_argument("grid_search: empty candidate set");
  }
  std::vector<double> sorted = candidate_durations;
  std::sort(sorted.begin(), sorted.end());

  std::vector<std::vector<double>> assignments;
  std::vector<double> prefix;
  if (palindromic_only) {
    const int free_slots = (n_turns + 1) / 2;
    std::vector<std::vector<double>> halves;
    enumerate(sorted, free_slots, prefix, halves);
    for (const auto& half : halves) {
      assignments.push_back(mirror(half, n_turns));
    }
  } else {
    enumerate(sorted, n_turns, prefix, assignments);
  }

  GridSearchResult result;
  for (const auto& pattern : assignments) {
    PatternCandidate candidate;
    candidate.turn_durations = pattern;
    try {
      candidate.score = score_pattern(pattern, cfg);
    } catch (const std::runtime_error&) {
      candidate.feasible = false;
      candidate.score = std::numeric_limits<double>::infinity();
    }
    result.ranking.push_back(std::move(candidate));
  }

  std::sort(result.ranking.begin(), result.ranking.end(),
            [](const PatternCandidate& a, const PatternCandidate& b) {
              if (a.feasible != b.feasible) return a.feasible;
              if (a.score != b.score) return a.score < b.score;
              return a.turn_durations < b.turn_durations;
            });
  if (result.ranking.empty() || !result.ranking.front().feasible) {
    throw std::runtime_error("grid_search: no feasible pattern");
  }
  result.best = result.ranking.front();
  return result;
}

}  // namespace forge::patterns
