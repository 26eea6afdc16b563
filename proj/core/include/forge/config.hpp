#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forge/env.hpp"
#include "forge/physics.hpp"
#include "forge/ppo.hpp"

// One structured document holding every knob of the pipeline. The on-disk
// format is flat "dotted.key = value" lines; unknown keys are rejected.

namespace forge {

struct RunConfig {
  // Line geometry and movement.
  double bar_length = 4.0;     // m
  double band_length = 30.0;   // m
  double roller_speed = 0.04;  // m/s, normal production
  double wh_speed = 0.04;      // m/s, warm-holding oscillation
  int n_segments = 40;
  double dt = 1.0;             // s
  double piece_length = 0.5;   // m
  double zone_span = 20.0;     // m of heated line starting at 0
  int n_zones = 5;
  double zone1_power = 2.0e6;   // W, fixed
  double zone2_power = 4.2e6;   // W, fixed
  double p_max = 0.4e6;         // W, zones 3-5

  physics::MaterialParams material;
  physics::Environment ambient;

  // Temperature specification bands, degC.
  double required_lo = 1010.0;
  double required_hi = 1090.0;
  double desired_lo = 1060.0;
  double desired_hi = 1080.0;

  env::RewardConfig reward;

  // Episode setup.
  int horizon_steps = 1200;
  double hold_duration = 540.0;  // s
  std::vector<double> turn_pattern = {64, 60, 60, 64, 64, 60, 60, 64};
  double entry_temp = 20.0;      // degC, normal-mode entry profile
  double entry_head_pos = 0.0;   // m
  double wh_head_pos = 18.0;     // m
  double wh_profile_mean = 1050.0;
  double wh_profile_std = 15.0;
  double wh_profile_lo = 950.0;
  double wh_profile_hi = 1090.0;

  ppo::PpoConfig ppo;

  // Warm-holding pattern grid search.
  std::vector<double> pattern_candidates = {56, 60, 64, 68};
  int pattern_n_turns = 8;
  bool pattern_palindromic = true;
  double pattern_power = 0.2e6;  // W, constant zones 3-5 power while scoring

  std::uint64_t seed = 1;
  std::string out_dir = "out";

  // Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

// Parses a config file; missing keys keep defaults, unknown keys and
// invariant violations are rejected with the field name. An empty or
// absent-key file yields the full defaults.
RunConfig load_config(const std::string& path);

// Applies one "dotted.key=value" override; same key set as the file.
void set_field(RunConfig& cfg, const std::string& key,
               const std::string& value);

// Serializes every field back to the file syntax.
std::string dump_config(const RunConfig& cfg);

// All recognized keys, for diagnostics.
std::vector<std::string> config_keys();

// Deterministic per-purpose seed derivation so one root seed drives every
// substream (init, rollout, reset, eval...).
std::uint64_t derive_seed(std::uint64_t root, const std::string& stream);

}  // namespace forge
