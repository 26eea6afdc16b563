#include "forge/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace forge {

namespace {

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for " + key +
                                ": '" + v + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for " + key +
                                ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean value for " + key + ": '" +
                              v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_double(key, cell));
  if (out.empty()) {
    throw std::invalid_argument("config: empty list for " + key);
  }
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += fmt(xs[i]);
  }
  return s;
}

std::string fmt(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(xs[i]);
  }
  return s;
}

#define NUM_FIELD(name, expr)                                             \
  Field {                                                                 \
    name,                                                                 \
        [](RunConfig& c, const std::string& v) {                          \
          c.expr = parse_double(name, v);                                 \
        },                                                                \
        [](const RunConfig& c) { return fmt(c.expr); }                    \
  }
#define INT_FIELD(name, expr)                                             \
  Field {                                                                 \
    name,                                                                 \
        [](RunConfig& c, const std::string& v) {                          \
          c.expr = static_cast<int>(parse_long(name, v));                 \
        },                                                                \
        [](const RunConfig& c) { return std::to_string(c.expr); }         \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      NUM_FIELD("sim.bar_length", bar_length),
      NUM_FIELD("sim.band_length", band_length),
      NUM_FIELD("sim.roller_speed", roller_speed),
      NUM_FIELD("sim.wh_speed", wh_speed),
      INT_FIELD("sim.n_segments", n_segments),
      NUM_FIELD("sim.dt", dt),
      NUM_FIELD("sim.piece_length", piece_length),
      NUM_FIELD("sim.zone_span", zone_span),
      INT_FIELD("sim.n_zones", n_zones),
      NUM_FIELD("sim.zone1_power", zone1_power),
      NUM_FIELD("sim.zone2_power", zone2_power),
      NUM_FIELD("sim.p_max", p_max),
      NUM_FIELD("sim.ambient_temp", ambient.ambient_temp),
      NUM_FIELD("sim.conv_coeff", ambient.conv_coeff),
      NUM_FIELD("sim.conv_exponent", ambient.conv_exponent),
      NUM_FIELD("material.specific_heat", material.specific_heat),
      NUM_FIELD("material.emissivity", material.emissivity),
      NUM_FIELD("material.curie_temp", material.curie_temp),
      NUM_FIELD("material.k_below", material.k_below),
      NUM_FIELD("material.k_above", material.k_above),
      NUM_FIELD("material.bar_mass", material.bar_mass),
      NUM_FIELD("material.bar_diameter", material.bar_diameter),
      NUM_FIELD("limits.required_lo", required_lo),
      NUM_FIELD("limits.required_hi", required_hi),
      NUM_FIELD("limits.desired_lo", desired_lo),
      NUM_FIELD("limits.desired_hi", desired_hi),
      NUM_FIELD("reward.target_temp", reward.target_temp),
      NUM_FIELD("reward.even_clip_lo", reward.even_clip_lo),
      NUM_FIELD("reward.even_clip_hi", reward.even_clip_hi),
      NUM_FIELD("reward.move_scale", reward.move_scale),
      NUM_FIELD("reward.heat_penalty", reward.heat_penalty),
      NUM_FIELD("reward.heat_threshold", reward.heat_threshold),
      NUM_FIELD("reward.hard_max_temp", reward.hard_max_temp),
      NUM_FIELD("reward.hard_mask_margin", reward.hard_mask_margin),
      INT_FIELD("episode.horizon_steps", horizon_steps),
      NUM_FIELD("episode.hold_duration", hold_duration),
      Field{"episode.turn_pattern",
            [](RunConfig& c, const std::string& v) {
              c.turn_pattern = parse_list("episode.turn_pattern", v);
            },
            [](const RunConfig& c) { return fmt(c.turn_pattern); }},
      NUM_FIELD("episode.entry_temp", entry_temp),
      NUM_FIELD("episode.entry_head_pos", entry_head_pos),
      NUM_FIELD("episode.wh_head_pos", wh_head_pos),
      NUM_FIELD("episode.wh_profile_mean", wh_profile_mean),
      NUM_FIELD("episode.wh_profile_std", wh_profile_std),
      NUM_FIELD("episode.wh_profile_lo", wh_profile_lo),
      NUM_FIELD("episode.wh_profile_hi", wh_profile_hi),
      NUM_FIELD("ppo.clip_ratio", ppo.clip_ratio),
      NUM_FIELD("ppo.lr_pi", ppo.lr_pi),
      NUM_FIELD("ppo.lr_v", ppo.lr_v),
      NUM_FIELD("ppo.gamma", ppo.gamma),
      NUM_FIELD("ppo.lambda", ppo.lam),
      INT_FIELD("ppo.steps_per_epoch", ppo.steps_per_epoch),
      INT_FIELD("ppo.epochs", ppo.epochs),
      INT_FIELD("ppo.train_pi_iters", ppo.train_pi_iters),
      INT_FIELD("ppo.train_v_iters", ppo.train_v_iters),
      NUM_FIELD("ppo.target_kl", ppo.target_kl),
      NUM_FIELD("ppo.log_std_init", ppo.log_std_init),
      Field{"ppo.hidden",
            [](RunConfig& c, const std::string& v) {
              std::vector<double> xs = parse_list("ppo.hidden", v);
              c.ppo.hidden.assign(xs.begin(), xs.end());
            },
            [](const RunConfig& c) { return fmt(c.ppo.hidden); }},
      Field{"pattern.candidates",
            [](RunConfig& c, const std::string& v) {
              c.pattern_candidates = parse_list("pattern.candidates", v);
            },
            [](const RunConfig& c) { return fmt(c.pattern_candidates); }},
      INT_FIELD("pattern.n_turns", pattern_n_turns),
      Field{"pattern.palindromic",
            [](RunConfig& c, const std::string& v) {
              c.pattern_palindromic = parse_bool("pattern.palindromic", v);
            },
            [](const RunConfig& c) {
              return c.pattern_palindromic ? "true" : "false";
            }},
      NUM_FIELD("pattern.power", pattern_power),
      Field{"run.seed",
            [](RunConfig& c, const std::string& v) {
              c.seed = static_cast<std::uint64_t>(parse_long("run.seed", v));
            },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      Field{"run.out_dir",
            [](RunConfig& c, const std::string& v) { c.out_dir = v; },
            [](const RunConfig& c) { return c.out_dir; }},
  };
  return table;
}

#undef NUM_FIELD
#undef INT_FIELD

void check(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(std::string("config: ") + message);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

void RunConfig::validate() const {
  material.validate();
  check(bar_length > 0, "sim.bar_length must be positive");
  check(band_length > 0, "sim.band_length must be positive");
  check(roller_speed > 0, "sim.roller_speed must be positive");
  check(wh_speed > 0, "sim.wh_speed must be positive");
  check(n_segments >= 1, "sim.n_segments must be at least 1");
  check(dt > 0, "sim.dt must be positive");
  check(piece_length > 0, "sim.piece_length must be positive");
  check(n_zones >= 1, "sim.n_zones must be at least 1");
  check(zone_span > 0 && zone_span <= band_length,
        "sim.zone_span must lie within the band");
  check(zone1_power >= 0, "sim.zone1_power must be non-negative");
  check(zone2_power >= 0, "sim.zone2_power must be non-negative");
  check(p_max > 0, "sim.p_max must be positive");
  const double seg_len = bar_length / n_segments;
  const double per_piece = piece_length / seg_len;
  check(std::abs(per_piece - std::llround(per_piece)) < 1e-9,
        "sim.piece_length must be a multiple of the segment length");
  const double pieces = bar_length / piece_length;
  check(std::abs(pieces - std::llround(pieces)) < 1e-9,
        "sim.bar_length must be a multiple of sim.piece_length");
  check(required_lo < required_hi, "limits.required band is inverted");
  check(desired_lo < desired_hi, "limits.desired band is inverted");
  check(desired_lo >= required_lo && desired_hi <= required_hi,
        "limits.desired band must nest inside limits.required");
  check(required_hi <= reward.hard_max_temp,
        "limits.required_hi must not exceed reward.hard_max_temp");
  check(reward.even_clip_lo < reward.even_clip_hi,
        "reward.even_clip band is inverted");
  check(reward.heat_threshold <= reward.hard_max_temp,
        "reward.heat_threshold must not exceed reward.hard_max_temp");
  check(reward.hard_mask_margin >= 0,
        "reward.hard_mask_margin must be non-negative");
  check(horizon_steps >= 1, "episode.horizon_steps must be at least 1");
  check(hold_duration > 0, "episode.hold_duration must be positive");
  check(!turn_pattern.empty(), "episode.turn_pattern must be non-empty");
  for (double d : turn_pattern) {
    check(d > 0, "episode.turn_pattern durations must be positive");
  }
  check(wh_head_pos > bar_length && wh_head_pos < band_length,
        "episode.wh_head_pos must place the bar inside the band");
  check(wh_profile_lo <= wh_profile_hi,
        "episode.wh_profile band is inverted");
  check(wh_profile_std >= 0, "episode.wh_profile_std must be non-negative");
  check(ppo.clip_ratio > 0 && ppo.clip_ratio < 1,
        "ppo.clip_ratio must lie in (0, 1)");
  check(ppo.gamma > 0 && ppo.gamma <= 1, "ppo.gamma must lie in (0, 1]");
  check(ppo.lam >= 0 && ppo.lam <= 1, "ppo.lambda must lie in [0, 1]");
  check(ppo.steps_per_epoch >= 1, "ppo.steps_per_epoch must be at least 1");
  check(ppo.epochs >= 1, "ppo.epochs must be at least 1");
  check(pattern_n_turns >= 1, "pattern.n_turns must be at least 1");
  check(!pattern_candidates.empty(),
        "pattern.candidates must be non-empty");
  check(pattern_power >= 0 && pattern_power <= p_max,
        "pattern.power must lie in [0, sim.p_max]");
}

void set_field(RunConfig& cfg, const std::string& key,
               const std::string& value) {
  for (const Field& field : fields()) {
    if (key == field.key) {
      field.set(cfg, value);
      return;
    }
  }
  throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot read " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not 'key = value'");
    }
    set_field(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

std::string dump_config(const RunConfig& cfg) {
  std::string out;
  for (const Field& field : fields()) {
    out += field.key;
    out += " = ";
    out += field.get(cfg);
    out += '\n';
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& field : fields()) keys.push_back(field.key);
  return keys;
}

std::uint64_t derive_seed(std::uint64_t root, const std::string& stream) {
  // FNV-1a over the stream name, then a splitmix64 finalizer mixing in the
  // root, so substreams are stable under unrelated config edits.
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::uint64_t z = root + 0x9e3779b97f4a7c15ull + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace forge
