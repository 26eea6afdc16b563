#include "forge/env.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "forge/config.hpp"

namespace forge::env {

std::vector<double> encode_state(const std::vector<double>& temps,
                                 double head_pos, double tail_pos,
                                 long step_index, const EncodeScales& scales) {
  std::vector<double> out;
  out.reserve(temps.size() + 3);
  for (double t : temps) {
    if (!std::isfinite(t)) {
      throw std::invalid_argument("encode_state: non-finite temperature");
    }
    out.push_back(t / scales.hard_max_temp);
  }
  if (!std::isfinite(head_pos) || !std::isfinite(tail_pos)) {
    throw std::invalid_argument("encode_state: non-finite position");
  }
  out.push_back(head_pos / scales.band_length);
  out.push_back(tail_pos / scales.band_length);
  out.push_back(static_cast<double>(step_index) / scales.horizon_steps);
  return out;
}

std::array<double, 3> decode_action(const std::array<double, 3>& action,
                                    double p_max) {
  std::array<double, 3> powers{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double p = (action[i] + 1.0) / 2.0 * p_max;
    powers[i] = std::clamp(p, 0.0, p_max);
  }
  return powers;
}

std::array<double, 3> safety_mask(std::array<double, 3> powers,
                                  const twin::LineState& state,
                                  const RewardConfig& cfg) {
  const double trip = cfg.hard_max_temp - cfg.hard_mask_margin;
  std::size_t k = 0;
  for (const twin::Zone& zone : state.zones) {
    if (!zone.learnable) continue;
    if (k >= powers.size()) break;
    bool hot = false;
    for (const twin::SteelBar& bar : state.bars) {
      const double tail = bar.tail_pos();
      for (int i = 0; i < bar.n_segments() && !hot; ++i) {
        const double lo = tail + i * bar.segment_length;
        const double hi = lo + bar.segment_length;
        if (std::min(hi, zone.end) - std::max(lo, zone.start) > 0 &&
            bar.segment_temps[i] >= trip) {
          hot = true;
        }
      }
      if (hot) break;
    }
    if (hot) powers[k] = 0.0;
    ++k;
  }
  return powers;
}

RewardBreakdown compute_reward(const std::vector<double>& temps,
                               double head_pos, double band_length,
                               const RewardConfig& cfg) {
  if (temps.empty()) {
    throw std::invalid_argument("compute_reward: no temperatures");
  }
  double abs_err = 0.0;
  double max_temp = temps[0];
  for (double t : temps) {
    abs_err += std::abs(t - cfg.target_temp);
    max_temp = std::max(max_temp, t);
  }
  double mae = abs_err / static_cast<double>(temps.size());
  mae = std::max(mae, 0.1);  // guards log10(0); -log10(0.1) = +1 = the clip
  RewardBreakdown r;
  r.even = std::clamp(-std::log10(mae), cfg.even_clip_lo, cfg.even_clip_hi);
  r.move = cfg.move_scale * std::clamp(head_pos / band_length, 0.0, 1.0);
  r.heat = max_temp > cfg.heat_threshold ? cfg.heat_penalty : 0.0;
  r.total = r.even + r.move + r.heat;
  return r;
}

twin::LineState build_line(const RunConfig& cfg, Mode mode,
                           std::uint64_t seed) {
  ForgingEnv env(cfg);
  env.reset(mode, seed);
  return env.line();
}

ForgingEnv::ForgingEnv(const RunConfig& cfg) {
  cfg.validate();
  reward_cfg_ = cfg.reward;
  scales_ = {cfg.reward.hard_max_temp, cfg.band_length, cfg.horizon_steps};
  n_segments_ = cfg.n_segments;
  bar_length_ = cfg.bar_length;
  normal_speed_ = cfg.roller_speed;
  wh_speed_ = cfg.wh_speed;
  hold_duration_ = cfg.hold_duration;
  pattern_.turn_durations = cfg.turn_pattern;
  pattern_.cyclic = false;
  horizon_steps_ = cfg.horizon_steps;
  entry_temp_ = cfg.entry_temp;
  entry_head_pos_ = cfg.entry_head_pos;
  wh_head_pos_ = cfg.wh_head_pos;
  wh_profile_mean_ = cfg.wh_profile_mean;
  wh_profile_std_ = cfg.wh_profile_std;
  wh_profile_lo_ = cfg.wh_profile_lo;
  wh_profile_hi_ = cfg.wh_profile_hi;
  zone1_power_ = cfg.zone1_power;
  zone2_power_ = cfg.zone2_power;
  p_max_ = cfg.p_max;

  initial_line_ = twin::LineState{};
  initial_line_.dt = cfg.dt;
  initial_line_.band_length = cfg.band_length;
  initial_line_.ambient = cfg.ambient;
  initial_line_.piece_length = cfg.piece_length;
  initial_line_.record_history = false;
  const double zone_len = cfg.zone_span / cfg.n_zones;
  for (int i = 0; i < cfg.n_zones; ++i) {
    twin::Zone zone;
    zone.index = i + 1;
    zone.start = i * zone_len;
    zone.end = (i + 1) * zone_len;
    if (i == 0) {
      zone.power = zone.p_max = cfg.zone1_power;
    } else if (i == 1) {
      zone.power = zone.p_max = cfg.zone2_power;
    } else {
      zone.power = 0.0;
      zone.p_max = cfg.p_max;
      zone.learnable = true;
    }
    initial_line_.zones.push_back(zone);
  }

  twin::SteelBar bar;
  bar.id = 1;
  bar.segment_length = cfg.bar_length / cfg.n_segments;
  bar.material = cfg.material;
  bar.segment_temps.assign(cfg.n_segments, cfg.entry_temp);
  initial_line_.bars.push_back(bar);
}

std::vector<double> ForgingEnv::reset(Mode mode, std::uint64_t seed) {
  line_ = initial_line_;
  twin::SteelBar& bar = line_.bars.front();
  std::mt19937_64 rng(seed);
  if (mode == Mode::kNormal) {
    line_.mode = twin::Normal{normal_speed_};
    bar.head_pos = entry_head_pos_;
    std::fill(bar.segment_temps.begin(), bar.segment_temps.end(), entry_temp_);
  } else {
    line_.mode = twin::WarmHolding{wh_speed_, pattern_, hold_duration_,
                                   normal_speed_};
    bar.head_pos = wh_head_pos_;
    std::normal_distribution<double> dist(wh_profile_mean_, wh_profile_std_);
    for (double& t : bar.segment_temps) {
      t = std::clamp(dist(rng), wh_profile_lo_, wh_profile_hi_);
    }
  }
  frozen_head_temps_.clear();
  active_ = true;
  done_ = false;
  overheat_seen_ = false;
  last_head_pos_ = bar.head_pos;
  return encode_current();
}

std::vector<double> ForgingEnv::encode_current() const {
  std::vector<double> temps;
  temps.reserve(n_segments_);
  double head = last_head_pos_;
  double tail = head;
  if (!line_.bars.empty()) {
    const twin::RawObservation obs = twin::observe(line_);
    temps = obs.segment_temps;
    head = obs.head_pos;
    tail = obs.tail_pos;
  }
  temps.insert(temps.end(), frozen_head_temps_.begin(),
               frozen_head_temps_.end());
  return encode_state(temps, head, tail, line_.step_index, scales_);
}

StepResult ForgingEnv::step(const std::array<double, 3>& action) {
  if (!active_ || done_) {
    throw std::logic_error("ForgingEnv::step before reset or after done");
  }
  const std::array<double, 3> decoded = decode_action(action, p_max_);
  const std::array<double, 3> masked =
      safety_mask(decoded, line_, reward_cfg_);

  std::vector<double> powers;
  powers.reserve(line_.zones.size());
  std::size_t k = 0;
  for (const twin::Zone& zone : line_.zones) {
    powers.push_back(zone.learnable ? masked[k++] : zone.power);
  }

  const std::size_t pieces_before = line_.sheared_pieces.size();
  twin::step(line_, powers);

  StepResult result;
  result.applied_powers = masked;
  result.new_pieces.assign(line_.sheared_pieces.begin() + pieces_before,
                           line_.sheared_pieces.end());
  for (const twin::Piece& piece : result.new_pieces) {
    frozen_head_temps_.insert(frozen_head_temps_.begin(), piece.temps.begin(),
                              piece.temps.end());
  }

  std::vector<double> reward_temps;
  double reward_head;
  if (!line_.bars.empty()) {
    const twin::RawObservation obs = twin::observe(line_);
    reward_temps = obs.segment_temps;
    reward_head = obs.head_pos;
    last_head_pos_ = obs.head_pos;
  } else {
    // The bar was fully consumed this step; score the last piece at the
    // band end.
    reward_temps = result.new_pieces.empty()
                       ? std::vector<double>(frozen_head_temps_.begin(),
                                             frozen_head_temps_.begin() +
                                                 std::min<std::size_t>(
                                                     frozen_head_temps_.size(),
                                                     5))
                       : result.new_pieces.back().temps;
    reward_head = scales_.band_length;
    last_head_pos_ = scales_.band_length;
  }
  result.parts = compute_reward(reward_temps, reward_head,
                                scales_.band_length, reward_cfg_);
  result.reward = result.parts.total;

  result.max_temp = *std::max_element(reward_temps.begin(),
                                      reward_temps.end());
  for (const twin::Piece& piece : result.new_pieces) {
    for (double t : piece.temps) result.max_temp = std::max(result.max_temp, t);
  }
  if (result.max_temp > reward_cfg_.hard_max_temp) overheat_seen_ = true;

  done_ = line_.bars.empty() || line_.step_index >= horizon_steps_;
  result.done = done_;
  result.state = encode_current();
  return result;
}

}  // namespace forge::env
