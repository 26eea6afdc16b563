#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "forge/config.hpp"
#include "forge/csv.hpp"
#include "forge/harness.hpp"

using namespace forge;
namespace fs = std::filesystem;

namespace {

// Desk-top-of-the-desk scale so the whole file runs in seconds.
RunConfig tiny_config(const std::string& out_name) {
  RunConfig cfg;
  cfg.ppo.steps_per_epoch = 300;
  cfg.ppo.epochs = 2;
  cfg.ppo.hidden = {8};
  cfg.ppo.train_pi_iters = 5;
  cfg.ppo.train_v_iters = 5;
  cfg.out_dir = (fs::temp_directory_path() / out_name).string();
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in),
          std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("training command emits metrics and loadable checkpoints") {
  const RunConfig cfg = tiny_config("forge_harness_train");
  const auto outputs = harness::cmd_train(cfg, env::Mode::kNormal);

  CHECK(outputs.metrics.size() == 2);
  const csv::Table metrics = csv::read(outputs.metrics_csv);
  CHECK(metrics.rows.size() == 2);
  CHECK(metrics.column("trailing100_return") >= 0);

  const nn::Checkpoint best = nn::Checkpoint::load(outputs.checkpoint_best);
  const nn::Checkpoint final_ck =
      nn::Checkpoint::load(outputs.checkpoint_final);
  CHECK(best.mode == "normal");
  CHECK(final_ck.policy_sizes == std::vector<int>{43, 8, 3});
  CHECK(final_ck.critic_sizes == std::vector<int>{43, 8, 1});

  SUBCASE("evaluation on the checkpoint produces consistent summaries") {
    const auto summary =
        harness::cmd_eval(cfg, outputs.checkpoint_final, 5, false);
    CHECK(summary.n_pieces == 5 * 8);
    CHECK(summary.frac_below_required >= 0.0);
    CHECK(summary.frac_in_required >= 0.0);
    CHECK(summary.frac_above_required >= 0.0);
    CHECK(summary.frac_below_required + summary.frac_in_required +
              summary.frac_above_required ==
          doctest::Approx(1.0));
    CHECK(summary.frac_in_desired <= summary.frac_in_required);

    const csv::Table pieces = csv::read(summary.pieces_csv);
    CHECK(pieces.rows.size() == 40);
    REQUIRE(pieces.column("mean_temp_c") >= 0);
    const int lo = pieces.column("min_temp_c");
    const int mid = pieces.column("mean_temp_c");
    const int hi = pieces.column("max_temp_c");
    for (std::size_t r = 0; r < pieces.rows.size(); ++r) {
      CHECK(pieces.as_double(r, lo) <= pieces.as_double(r, mid));
      CHECK(pieces.as_double(r, mid) <= pieces.as_double(r, hi));
    }

    const csv::Table steps = csv::read(summary.steps_csv);
    CHECK(steps.rows.size() == 850);  // one full traced episode
    CHECK(steps.column("r_total") >= 0);
    CHECK(steps.column("p5_w") >= 0);
  }

  fs::remove_all(cfg.out_dir);
}

TEST_CASE("pattern search command writes the full ranking") {
  RunConfig cfg = tiny_config("forge_harness_pattern");
  cfg.pattern_candidates = {60.0, 64.0};
  cfg.pattern_n_turns = 4;
  cfg.hold_duration = 60.0;
  const auto outputs = harness::cmd_pattern_search(cfg);
  CHECK(outputs.result.ranking.size() == 4);
  const csv::Table ranking = csv::read(outputs.ranking_csv);
  CHECK(ranking.rows.size() == 4);
  CHECK(ranking.rows[0][ranking.column("feasible")] == "true");
  CHECK(ranking.rows[0][ranking.column("pattern")] ==
        harness::join_pattern(outputs.result.best.turn_durations));
  fs::remove_all(cfg.out_dir);
}

TEST_CASE("simulate command") {
  RunConfig cfg = tiny_config("forge_harness_sim");
  const std::string schedule =
      (fs::temp_directory_path() / "forge_sched.csv").string();
  {
    std::ofstream out(schedule);
    out << "p3_w,p4_w,p5_w\n";
    for (int i = 0; i < 900; ++i) out << "0,0,0\n";
  }

  SUBCASE("zero schedule on a hot bar cools monotonically") {
    RunConfig hot = cfg;
    hot.entry_temp = 900.0;
    hot.zone1_power = 0.0;  // silence the fixed zones so only losses act
    hot.zone2_power = 0.0;
    const std::string path = harness::cmd_simulate(hot, schedule);
    const csv::Table trajectory = csv::read(path);
    REQUIRE(!trajectory.rows.empty());
    const int col = trajectory.column("seg_000");
    REQUIRE(col >= 0);
    double prev = 900.0;
    // Segment 0 is the tail; track it until it leaves the bar.
    for (std::size_t r = 0; r + 100 < trajectory.rows.size(); ++r) {
      const double t = trajectory.as_double(r, col);
      CHECK(t <= prev + 1e-12);
      prev = t;
    }
  }

  SUBCASE("malformed schedule is rejected") {
    const std::string bad =
        (fs::temp_directory_path() / "forge_sched_bad.csv").string();
    {
      std::ofstream out(bad);
      out << "p3_w,p4_w\n0,0\n";
    }
    CHECK_THROWS_AS(harness::cmd_simulate(cfg, bad), std::runtime_error);
    fs::remove(bad);
  }

  fs::remove(schedule);
  fs::remove_all(cfg.out_dir);
}

TEST_CASE("seeded pipeline reruns emit byte-identical CSVs") {
  auto run = [](const std::string& dir) {
    RunConfig cfg = tiny_config(dir);
    cfg.pattern_candidates = {60.0, 64.0};
    cfg.pattern_n_turns = 2;
    cfg.hold_duration = 60.0;
    harness::cmd_pattern_search(cfg);
    const auto train = harness::cmd_train(cfg, env::Mode::kNormal);
    harness::cmd_eval(cfg, train.checkpoint_final, 3, false);
    return cfg.out_dir;
  };
  const std::string a = run("forge_pipe_a");
  const std::string b = run("forge_pipe_b");
  for (const char* name :
       {"ranking.csv", "metrics_normal.csv", "pieces.csv", "steps.csv",
        "checkpoint_normal_final.ckpt"}) {
    CHECK(slurp((fs::path(a) / name).string()) ==
          slurp((fs::path(b) / name).string()));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}
