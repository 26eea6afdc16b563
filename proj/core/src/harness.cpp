#include "forge/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "forge/csv.hpp"
#include "forge/nn.hpp"

namespace forge::harness {

namespace {

namespace fs = std::filesystem;

std::string mode_name(env::Mode mode) {
  return mode == env::Mode::kNormal ? "normal" : "warm-holding";
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

nn::Checkpoint make_checkpoint(const ppo::TrainResult& result,
                               const std::string& mode,
                               const std::vector<double>& policy_params,
                               const std::vector<double>& log_std,
                               const std::vector<double>& critic_params) {
  nn::Checkpoint ck;
  ck.mode = mode;
  ck.policy_sizes = result.policy.mean_net().sizes();
  ck.policy_params = policy_params;
  ck.log_std = log_std;
  ck.critic_sizes = result.critic.sizes();
  ck.critic_params = critic_params;
  return ck;
}

}  // namespace

std::string join_pattern(const std::vector<double>& durations) {
  std::string s;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    if (i) s += '-';
    s += csv::format_double(durations[i]);
  }
  return s;
}

TrainOutputs cmd_train(const RunConfig& cfg, env::Mode mode) {
  cfg.validate();
  env::ForgingEnv environment(cfg);
  ppo::PpoConfig ppo_cfg = cfg.ppo;
  ppo_cfg.seed = derive_seed(cfg.seed, "train-" + mode_name(mode));
  ppo::ForgingRollout rollout(environment, mode,
                              derive_seed(ppo_cfg.seed, "episodes"));
  ppo::TrainResult result = ppo::train(rollout, ppo_cfg);

  TrainOutputs outputs;
  outputs.metrics = result.metrics;
  outputs.metrics_csv = out_path(cfg, "metrics_" + mode_name(mode) + ".csv");
  {
    csv::Writer writer(outputs.metrics_csv,
                       {"epoch", "steps", "mean_return", "trailing100_return",
                        "pi_loss", "v_loss", "kl", "clip_frac", "episodes"});
    for (const ppo::TrainMetrics& row : result.metrics) {
      writer.field(row.epoch)
          .field(row.steps)
          .field(row.mean_return)
          .field(row.trailing100_return)
          .field(row.pi_loss)
          .field(row.v_loss)
          .field(row.kl)
          .field(row.clip_frac)
          .field(row.episodes);
      writer.end_row();
    }
  }

  outputs.checkpoint_final =
      out_path(cfg, "checkpoint_" + mode_name(mode) + "_final.ckpt");
  make_checkpoint(result, mode_name(mode), result.policy.mean_net().params(),
                  result.policy.log_std(), result.critic.params())
      .save(outputs.checkpoint_final);

  outputs.checkpoint_best =
      out_path(cfg, "checkpoint_" + mode_name(mode) + "_best.ckpt");
  make_checkpoint(result, mode_name(mode), result.best_policy_params,
                  result.best_log_std, result.best_critic_params)
      .save(outputs.checkpoint_best);
  return outputs;
}

EvalSummary cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path,
                     int n_episodes, bool deterministic) {
  cfg.validate();
  const nn::Checkpoint ck = nn::Checkpoint::load(checkpoint_path);
  const env::Mode mode = ck.mode == "warm-holding" ? env::Mode::kWarmHolding
                                                   : env::Mode::kNormal;

  env::ForgingEnv environment(cfg);
  if (ck.policy_sizes.front() != environment.state_dim()) {
    throw std::runtime_error(
        "cmd_eval: checkpoint state size does not match the configuration");
  }
  std::vector<int> hidden(ck.policy_sizes.begin() + 1,
                          ck.policy_sizes.end() - 1);
  nn::GaussianPolicy policy(ck.policy_sizes.front(), hidden,
                            ck.policy_sizes.back(), 0.0);
  policy.mean_net().params() = ck.policy_params;
  policy.log_std() = ck.log_std;

  // Per-step record of the first episode, then the bulk evaluation.
  EvalSummary summary;
  summary.steps_csv = out_path(cfg, "steps.csv");
  {
    csv::Writer writer(summary.steps_csv,
                       {"t", "r_total", "r_even", "r_heat", "r_move", "p3_w",
                        "p4_w", "p5_w", "max_temp_c"});
    std::mt19937_64 noise(derive_seed(cfg.seed, "eval-trace"));
    std::vector<double> state =
        environment.reset(mode, derive_seed(cfg.seed, "eval-episode0"));
    long t = 0;
    while (!environment.done()) {
      std::vector<double> a =
          deterministic ? policy.mean_action(state)
                        : policy.sample(state, noise).action;
      env::StepResult r = environment.step({a[0], a[1], a[2]});
      writer.field(t)
          .field(r.parts.total)
          .field(r.parts.even)
          .field(r.parts.heat)
          .field(r.parts.move)
          .field(r.applied_powers[0])
          .field(r.applied_powers[1])
          .field(r.applied_powers[2])
          .field(r.max_temp);
      writer.end_row();
      state = std::move(r.state);
      ++t;
    }
  }

  const std::vector<env::EpisodeOutcome> outcomes =
      ppo::evaluate(policy, environment, mode, n_episodes, !deterministic,
                    derive_seed(cfg.seed, "eval"));

  summary.pieces_csv = out_path(cfg, "pieces.csv");
  csv::Writer writer(summary.pieces_csv,
                     {"episode", "piece_index", "exit_time_s", "min_temp_c",
                      "mean_temp_c", "max_temp_c"});
  long below = 0, within = 0, above = 0, desired = 0;
  double return_sum = 0.0;
  for (std::size_t ep = 0; ep < outcomes.size(); ++ep) {
    const env::EpisodeOutcome& outcome = outcomes[ep];
    return_sum += outcome.total_reward;
    if (outcome.overheat) ++summary.overheat_episodes;
    for (const twin::Piece& piece : outcome.pieces) {
      const auto [lo, hi] =
          std::minmax_element(piece.temps.begin(), piece.temps.end());
      const double mean =
          std::accumulate(piece.temps.begin(), piece.temps.end(), 0.0) /
          static_cast<double>(piece.temps.size());
      writer.field(static_cast<long>(ep))
          .field(piece.piece_index)
          .field(piece.exit_time)
          .field(*lo)
          .field(mean)
          .field(*hi);
      writer.end_row();
      ++summary.n_pieces;
      if (mean < cfg.required_lo) {
        ++below;
      } else if (mean > cfg.required_hi) {
        ++above;
      } else {
        ++within;
        if (mean >= cfg.desired_lo && mean <= cfg.desired_hi) ++desired;
      }
    }
  }
  if (summary.n_pieces > 0) {
    const double n = static_cast<double>(summary.n_pieces);
    summary.frac_below_required = below / n;
    summary.frac_in_required = within / n;
    summary.frac_above_required = above / n;
    summary.frac_in_desired = desired / n;
  }
  if (!outcomes.empty()) {
    summary.mean_return = return_sum / static_cast<double>(outcomes.size());
  }
  return summary;
}

PatternSearchOutputs cmd_pattern_search(const RunConfig& cfg) {
  cfg.validate();
  PatternSearchOutputs outputs;
  outputs.result =
      patterns::grid_search(cfg.pattern_candidates, cfg.pattern_n_turns, cfg,
                            cfg.pattern_palindromic);
  outputs.ranking_csv = out_path(cfg, "ranking.csv");
  csv::Writer writer(outputs.ranking_csv, {"pattern", "feasible", "score_c"});
  for (const patterns::PatternCandidate& candidate :
       outputs.result.ranking) {
    writer.field(join_pattern(candidate.turn_durations))
        .field(std::string(candidate.feasible ? "true" : "false"))
        .field(candidate.feasible ? candidate.score : -1.0);
    writer.end_row();
  }
  return outputs;
}

std::string cmd_simulate(const RunConfig& cfg,
                         const std::string& schedule_path) {
  cfg.validate();
  const csv::Table schedule = csv::read(schedule_path);
  const int c3 = schedule.column("p3_w");
  const int c4 = schedule.column("p4_w");
  const int c5 = schedule.column("p5_w");
  if (c3 < 0 || c4 < 0 || c5 < 0) {
    throw std::runtime_error(
        "cmd_simulate: schedule needs columns p3_w,p4_w,p5_w");
  }

  twin::LineState line = env::build_line(cfg, env::Mode::kNormal,
                                         derive_seed(cfg.seed, "simulate"));
  line.record_history = true;
  for (std::size_t row = 0; row < schedule.rows.size() && !line.bars.empty();
       ++row) {
    std::vector<double> powers;
    std::size_t k = 0;
    const double learnable[3] = {schedule.as_double(row, c3),
                                 schedule.as_double(row, c4),
                                 schedule.as_double(row, c5)};
    for (const twin::Zone& zone : line.zones) {
      powers.push_back(zone.learnable ? learnable[k++] : zone.power);
    }
    twin::step(line, powers);
  }

  const std::string path = out_path(cfg, "trajectory.csv");
  std::ofstream out(path);
  if (!line.bars.empty()) {
    twin::export_history_csv(line.bars.front().history, out);
  } else if (!line.retired_histories.empty()) {
    twin::export_history_csv(line.retired_histories.front().second, out);
  }
  return path;
}

}  // namespace forge::harness
