#pragma once

#include <vector>

// Grid search over warm-holding movement patterns under constant power,
// minimizing the final temperature unevenness at the end of the hold.

namespace forge {
struct RunConfig;
}

namespace forge::patterns {

struct PatternCandidate {
  std::vector<double> turn_durations;  // s
  double score = 0.0;  // mean absolute deviation from target, degC
  bool feasible = true;
};

struct GridSearchResult {
  PatternCandidate best;
  std::vector<PatternCandidate> ranking;  // by (score, lexicographic)
};

// Simulates the warm hold with the given turn pattern from the noise-free
// warm-holding initial state at constant zones 3-5 power and returns the
// MAD from the target temperature when the hold ends. Throws
// std::runtime_error when the pattern is geometrically infeasible (the bar
// would leave the band or run off the line start).
double score_pattern(const std::vector<double>& turn_durations,
                     const RunConfig& cfg);

// Enumerates duration assignments (all of them, or only palindromic ones),
// scores each, drops infeasible candidates, and returns the argmin with
// ties broken by the lexicographically smallest duration list.
GridSearchResult grid_search(const std::vector<double>& candidate_durations,
                             int n_turns, const RunConfig& cfg,
                             bool palindromic_only);

}  // namespace forge::patterns
