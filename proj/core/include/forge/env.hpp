#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "forge/twin.hpp"

// MDP wrapper over the digital twin: normalized state encoding, action
// decoding with hard power bounds, safety masking, the three-part reward,
// and episode lifecycle for normal production and warm holding.

namespace forge {
struct RunConfig;
}

namespace forge::env {

enum class Mode { kNormal, kWarmHolding };

struct RewardConfig {
  double target_temp = 1070.0;   // degC
  double even_clip_lo = -2.0;
  double even_clip_hi = 1.0;
  double move_scale = 3.0;
  double heat_penalty = -5.0;
  double heat_threshold = 1090.0;   // degC, fires the penalty
  double hard_max_temp = 1100.0;    // degC, safety limit
  double hard_mask_margin = 10.0;   // degC below the limit the mask trips
};

struct RewardBreakdown {
  double even = 0.0;
  double heat = 0.0;
  double move = 0.0;
  double total = 0.0;
};

struct EncodeScales {
  double hard_max_temp = 1100.0;
  double band_length = 30.0;
  int horizon_steps = 1200;
};

struct StepResult {
  std::vector<double> state;
  double reward = 0.0;
  bool done = false;
  RewardBreakdown parts;
  std::vector<twin::Piece> new_pieces;
  double max_temp = 0.0;                       // over the remaining bar
  std::array<double, 3> applied_powers{};      // after masking, W
};

struct EpisodeOutcome {
  std::vector<twin::Piece> pieces;
  double total_reward = 0.0;
  int step_count = 0;
  bool overheat = false;  // any recorded temp above hard_max_temp
};

// [temps... , head, tail, t], temperatures scaled by 1/hard_max_temp,
// positions by 1/band_length, time by 1/horizon_steps. Rejects non-finite
// inputs with std::invalid_argument.
std::vector<double> encode_state(const std::vector<double>& temps,
                                 double head_pos, double tail_pos,
                                 long step_index, const EncodeScales& scales);

// Affine map [-1,1] -> [0, p_max] per zone, clamped.
std::array<double, 3> decode_action(const std::array<double, 3>& action,
                                    double p_max);

// Forces a learnable zone's power to zero when any covered segment is
// within hard_mask_margin of hard_max_temp. powers are indexed in the order
// the learnable zones appear in state.zones.
std::array<double, 3> safety_mask(std::array<double, 3> powers,
                                  const twin::LineState& state,
                                  const RewardConfig& cfg);

// R_even + R_heat + R_move over the remaining bar. MAE is floored at 0.1
// so the log term never diverges (which also realizes the +1 clip).
RewardBreakdown compute_reward(const std::vector<double>& temps,
                               double head_pos, double band_length,
                               const RewardConfig& cfg);

// A fresh LineState as an episode would start it; used by the harness for
// open-loop simulation without the MDP wrapper.
twin::LineState build_line(const RunConfig& cfg, Mode mode,
                           std::uint64_t seed);

class ForgingEnv {
 public:
  explicit ForgingEnv(const RunConfig& cfg);

  std::vector<double> reset(Mode mode, std::uint64_t seed);

  // decode -> mask -> twin step -> encode -> reward. Throws
  // std::logic_error when called before reset or after done.
  StepResult step(const std::array<double, 3>& action);

  int state_dim() const { return n_segments_ + 3; }
  bool done() const { return done_; }
  const twin::LineState& line() const { return line_; }
  const std::vector<twin::Piece>& pieces() const {
    return line_.sheared_pieces;
  }
  bool overheat_seen() const { return overheat_seen_; }

 private:
  std::vector<double> encode_current() const;

  // Episode template, copied out of the RunConfig at construction.
  twin::LineState initial_line_;
  RewardConfig reward_cfg_;
  EncodeScales scales_;
  int n_segments_ = 40;
  double bar_length_ = 4.0;
  double normal_speed_ = 0.04;
  double wh_speed_ = 0.04;
  double hold_duration_ = 540.0;
  twin::TurnPattern pattern_;
  int horizon_steps_ = 1200;
  double entry_temp_ = 20.0;
  double entry_head_pos_ = 0.0;
  double wh_head_pos_ = 18.0;
  double wh_profile_mean_ = 1050.0;
  double wh_profile_std_ = 15.0;
  double wh_profile_lo_ = 950.0;
  double wh_profile_hi_ = 1090.0;
  double zone1_power_ = 2.0e6;
  double zone2_power_ = 4.2e6;
  double p_max_ = 0.4e6;

  // Episode state.
  twin::LineState line_;
  // Temperatures already sheared off, head-first, used to keep the state
  // vector at its fixed length after pieces leave the bar.
  std::vector<double> frozen_head_temps_;
  bool active_ = false;
  bool done_ = true;
  bool overheat_seen_ = false;
  double last_head_pos_ = 0.0;
};

}  // namespace forge::env
