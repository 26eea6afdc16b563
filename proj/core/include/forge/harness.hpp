#pragma once

#include <string>
#include <vector>

#include "forge/config.hpp"
#include "forge/env.hpp"
#include "forge/patterns.hpp"
#include "forge/ppo.hpp"

// Command implementations behind the CLI: each writes its CSV artifacts
// under cfg.out_dir and returns the paths/summary so tests can call them
// directly.

namespace forge::harness {

struct TrainOutputs {
  std::string metrics_csv;
  std::string checkpoint_best;
  std::string checkpoint_final;
  std::vector<ppo::TrainMetrics> metrics;
};

TrainOutputs cmd_train(const RunConfig& cfg, env::Mode mode);

struct EvalSummary {
  long n_pieces = 0;
  double frac_below_required = 0.0;
  double frac_in_required = 0.0;
  double frac_above_required = 0.0;
  double frac_in_desired = 0.0;
  long overheat_episodes = 0;
  double mean_return = 0.0;
  std::string pieces_csv;
  std::string steps_csv;  // per-step record of the first episode
};

EvalSummary cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path,
                     int n_episodes, bool deterministic);

struct PatternSearchOutputs {
  patterns::GridSearchResult result;
  std::string ranking_csv;
};

PatternSearchOutputs cmd_pattern_search(const RunConfig& cfg);

// Open-loop run of the twin from the normal-mode initial state, driven by
// a per-step schedule of zones 3-5 powers (CSV columns p3_w,p4_w,p5_w).
// Emits the trajectory history CSV.
std::string cmd_simulate(const RunConfig& cfg,
                         const std::string& schedule_path);

std::string join_pattern(const std::vector<double>& durations);

}  // namespace forge::harness
