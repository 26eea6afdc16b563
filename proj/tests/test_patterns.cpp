#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "forge/config.hpp"
#include "forge/patterns.hpp"

using namespace forge;
using namespace forge::patterns;

namespace {

// Small search setup so each candidate simulation stays cheap.
RunConfig search_config() {
  RunConfig cfg;
  cfg.hold_duration = 120.0;
  cfg.horizon_steps = 1200;
  return cfg;
}

}  // namespace

TEST_CASE("scoring is deterministic") {
  const RunConfig cfg = search_config();
  const std::vector<double> pattern{64, 60, 60, 64, 64, 60, 60, 64};
  const double a = score_pattern(pattern, cfg);
  const double b = score_pattern(pattern, cfg);
  CHECK(a == b);
  CHECK(a >= 0.0);
}

TEST_CASE("a single candidate duration returns the uniform pattern") {
  const RunConfig cfg = search_config();
  const auto result = grid_search({60.0}, 8, cfg, true);
  CHECK(result.ranking.size() == 1);
  CHECK(result.best.turn_durations == std::vector<double>(8, 60.0));
  CHECK(result.best.feasible);
}

TEST_CASE("palindromic search over {60,64} enumerates 16 candidates") {
  const RunConfig cfg = search_config();
  const auto result = grid_search({60.0, 64.0}, 8, cfg, true);
  REQUIRE(result.ranking.size() == 16);

  // Every candidate is a palindrome drawn from the set.
  for (const auto& cand : result.ranking) {
    REQUIRE(cand.turn_durations.size() == 8);
    for (int i = 0; i < 8; ++i) {
      CHECK((cand.turn_durations[i] == 60.0 ||
             cand.turn_durations[i] == 64.0));
      CHECK(cand.turn_durations[i] == cand.turn_durations[7 - i]);
    }
  }

  // All 16 are distinct.
  auto patterns_only = result.ranking;
  std::sort(patterns_only.begin(), patterns_only.end(),
            [](const PatternCandidate& a, const PatternCandidate& b) {
              return a.turn_durations < b.turn_durations;
            });
  for (std::size_t i = 1; i < patterns_only.size(); ++i) {
    CHECK(patterns_only[i].turn_durations !=
          patterns_only[i - 1].turn_durations);
  }

  // Argmin property: re-score everything independently and compare.
  for (const auto& cand : result.ranking) {
    if (!cand.feasible) continue;
    const double rescored = score_pattern(cand.turn_durations, cfg);
    CHECK(rescored == cand.score);
    CHECK(result.best.score <= rescored);
  }

  // The production pattern is a feasible member of the space.
  const std::vector<double> known{64, 60, 60, 64, 64, 60, 60, 64};
  const auto it = std::find_if(result.ranking.begin(), result.ranking.end(),
                               [&](const PatternCandidate& c) {
                                 return c.turn_durations == known;
                               });
  REQUIRE(it != result.ranking.end());
  CHECK(it->feasible);
}

TEST_CASE("ranking is ordered by score with lexicographic ties") {
  const RunConfig cfg = search_config();
  const auto result = grid_search({60.0, 64.0}, 4, cfg, true);
  for (std::size_t i = 1; i < result.ranking.size(); ++i) {
    const auto& prev = result.ranking[i - 1];
    const auto& cur = result.ranking[i];
    if (prev.feasible && cur.feasible) {
      CHECK((prev.score < cur.score ||
             (prev.score == cur.score &&
              prev.turn_durations <= cur.turn_durations)));
    }
  }
}

TEST_CASE("geometrically impossible patterns are infeasible") {
  RunConfig cfg = search_config();
  cfg.hold_duration = 600.0;
  // One long backward turn drives the tail below the line start.
  CHECK_THROWS_AS(score_pattern({500.0}, cfg), std::runtime_error);
  CHECK_THROWS_AS(grid_search({500.0}, 1, cfg, false), std::runtime_error);

  // Mixing in a workable duration keeps the search alive and ranks the
  // broken candidate last.
  const auto result = grid_search({60.0, 500.0}, 1, cfg, false);
  CHECK(result.best.turn_durations == std::vector<double>{60.0});
  CHECK_FALSE(result.ranking.back().feasible);
}

TEST_CASE("palindromic patterns return the bar to its starting position") {
  RunConfig cfg = search_config();
  const auto result = grid_search({60.0, 64.0}, 8, cfg, true);
  for (const auto& cand : result.ranking) {
    double total = 0.0;
    double sign = -1.0;
    for (double d : cand.turn_durations) {
      total += sign * d;
      sign = -sign;
    }
    CHECK(total == 0.0);
  }
}
