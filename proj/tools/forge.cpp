#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forge/config.hpp"
#include "forge/harness.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  long seed = -1;
  std::string out_dir;
  double p_max = -1;
};

void add_common(CLI::App* app, CommonOpts& opts) {
  app->add_option("--config", opts.config_path, "Config file path");
  app->add_option("--set", opts.overrides,
                  "Override a config field, e.g. --set reward.target_temp=1075")
      ->take_all();
  app->add_option("--seed", opts.seed, "Root random seed");
  app->add_option("--out", opts.out_dir, "Output directory");
  app->add_option("--p-max", opts.p_max, "Zones 3-5 power bound in W");
}

forge::RunConfig build_config(const CommonOpts& opts) {
  forge::RunConfig cfg;
  if (!opts.config_path.empty()) cfg = forge::load_config(opts.config_path);
  for (const std::string& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    }
    forge::set_field(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.p_max > 0) cfg.p_max = opts.p_max;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Induction heating line digital twin and PPO control"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string mode = "normal";
  std::string checkpoint_path;
  std::string schedule_path;
  int episodes = 1000;
  bool deterministic = false;
  bool print_config = false;

  CLI::App* train = app.add_subcommand("train", "Train a control policy");
  train->add_option("--mode", mode, "normal or warm-holding")
      ->check(CLI::IsMember({"normal", "warm-holding"}));
  add_common(train, opts);

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--checkpoint", checkpoint_path, "Checkpoint file")
      ->required();
  eval->add_option("--episodes", episodes, "Number of evaluation episodes");
  eval->add_flag("--deterministic", deterministic,
                 "Use the mean action instead of sampling");
  add_common(eval, opts);

  CLI::App* pattern = app.add_subcommand(
      "pattern-search", "Grid-search warm-holding movement patterns");
  add_common(pattern, opts);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Open-loop twin run from a power schedule");
  simulate->add_option("--schedule", schedule_path, "Schedule CSV")
      ->required();
  add_common(simulate, opts);

  CLI::App* config_cmd =
      app.add_subcommand("config", "Print the effective configuration");
  config_cmd->add_flag("--print", print_config, "Dump all keys");
  add_common(config_cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    const forge::RunConfig cfg = build_config(opts);
    if (train->parsed()) {
      const auto outputs = forge::harness::cmd_train(
          cfg, mode == "normal" ? forge::env::Mode::kNormal
                                : forge::env::Mode::kWarmHolding);
      std::printf("metrics: %s\n", outputs.metrics_csv.c_str());
      std::printf("checkpoint (best): %s\n", outputs.checkpoint_best.c_str());
      std::printf("checkpoint (final): %s\n",
                  outputs.checkpoint_final.c_str());
      if (!outputs.metrics.empty()) {
        std::printf("final trailing-100 return: %.3f\n",
                    outputs.metrics.back().trailing100_return);
      }
    } else if (eval->parsed()) {
      const auto summary =
          forge::harness::cmd_eval(cfg, checkpoint_path, episodes,
                                   deterministic);
      std::printf("pieces: %ld\n", summary.n_pieces);
      std::printf("fraction below required band: %.4f\n",
                  summary.frac_below_required);
      std::printf("fraction in required band:    %.4f\n",
                  summary.frac_in_required);
      std::printf("fraction above required band: %.4f\n",
                  summary.frac_above_required);
      std::printf("fraction in desired band:     %.4f\n",
                  summary.frac_in_desired);
      std::printf("overheat episodes: %ld\n", summary.overheat_episodes);
      std::printf("mean episode return: %.3f\n", summary.mean_return);
      std::printf("pieces CSV: %s\n", summary.pieces_csv.c_str());
    } else if (pattern->parsed()) {
      const auto outputs = forge::harness::cmd_pattern_search(cfg);
      std::printf("best pattern: %s (score %.4f degC)\n",
                  forge::harness::join_pattern(
                      outputs.result.best.turn_durations)
                      .c_str(),
                  outputs.result.best.score);
      std::printf("ranking CSV: %s\n", outputs.ranking_csv.c_str());
    } else if (simulate->parsed()) {
      const std::string path = forge::harness::cmd_simulate(cfg,
                                                            schedule_path);
      std::printf("trajectory CSV: %s\n", path.c_str());
    } else if (config_cmd->parsed()) {
      std::fputs(forge::dump_config(cfg).c_str(), stdout);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
