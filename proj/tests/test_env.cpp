#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "forge/config.hpp"
#include "forge/env.hpp"

using namespace forge;
using namespace forge::env;

TEST_CASE("state encoding") {
  EncodeScales scales;

  SUBCASE("normalization constants") {
    const auto s = encode_state({1100.0}, 30.0, 26.0, 0, scales);
    CHECK(s[0] == doctest::Approx(1.0));
    CHECK(s[1] == doctest::Approx(1.0));
  }

  SUBCASE("ambient bar at the line start") {
    const std::vector<double> temps(40, 20.0);
    const auto s = encode_state(temps, 0.0, -4.0, 0, scales);
    REQUIRE(s.size() == 43);
    for (int i = 0; i < 40; ++i) {
      CHECK(s[i] == doctest::Approx(20.0 / 1100.0));
    }
    CHECK(s[40] == doctest::Approx(0.0));
    CHECK(s[41] == doctest::Approx(-4.0 / 30.0));
    CHECK(s[42] == doctest::Approx(0.0));
  }

  SUBCASE("non-finite inputs rejected") {
    CHECK_THROWS_AS(encode_state({std::nan("")}, 0.0, 0.0, 0, scales),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        encode_state({20.0}, std::numeric_limits<double>::infinity(), 0.0, 0,
                     scales),
        std::invalid_argument);
  }
}

TEST_CASE("action decoding") {
  const double p_max = 0.4e6;
  SUBCASE("endpoints and midpoint") {
    auto lo = decode_action({-1.0, -1.0, -1.0}, p_max);
    auto hi = decode_action({1.0, 1.0, 1.0}, p_max);
    for (double p : lo) CHECK(p == 0.0);
    for (double p : hi) CHECK(p == doctest::Approx(p_max));
  }
  SUBCASE("out-of-range actions clamp") {
    auto p = decode_action({3.0, 0.0, -3.0}, p_max);
    CHECK(p[0] == doctest::Approx(0.4e6));
    CHECK(p[1] == doctest::Approx(0.2e6));
    CHECK(p[2] == 0.0);
  }
  SUBCASE("monotone and surjective onto [0, p_max]") {
    double prev = -1.0;
    for (double a = -1.0; a <= 1.0; a += 0.05) {
      const double p = decode_action({a, a, a}, p_max)[0];
      CHECK(p >= prev);
      CHECK(p >= 0.0);
      CHECK(p <= p_max);
      prev = p;
    }
  }
}

namespace {

twin::LineState masked_line(double hot_temp, double head_pos) {
  twin::LineState state;
  const double zone_len = 4.0;
  for (int i = 0; i < 5; ++i) {
    twin::Zone z;
    z.index = i + 1;
    z.start = i * zone_len;
    z.end = (i + 1) * zone_len;
    z.learnable = i >= 2;
    z.p_max = z.learnable ? 0.4e6 : 2.0e6;
    z.power = z.learnable ? 0.0 : 2.0e6;
    state.zones.push_back(z);
  }
  twin::SteelBar bar;
  bar.segment_length = 0.1;
  bar.head_pos = head_pos;
  bar.segment_temps.assign(40, 900.0);
  bar.segment_temps[39] = hot_temp;  // head segment
  state.bars.push_back(bar);
  return state;
}

}  // namespace

TEST_CASE("safety mask") {
  RewardConfig cfg;  // trip point at 1100 - 10 = 1090

  SUBCASE("cool bar passes powers through") {
    const auto state = masked_line(900.0, 14.0);
    const auto out = safety_mask({1e5, 2e5, 3e5}, state, cfg);
    CHECK(out[0] == 1e5);
    CHECK(out[1] == 2e5);
    CHECK(out[2] == 3e5);
  }

  SUBCASE("hot segment under zone 4 zeroes only zone 4") {
    // Head segment at [13.9, 14.0], inside zone 4 = [12, 16).
    const auto state = masked_line(1095.0, 14.0);
    const auto out = safety_mask({1e5, 2e5, 3e5}, state, cfg);
    CHECK(out[0] == 1e5);
    CHECK(out[1] == 0.0);
    CHECK(out[2] == 3e5);
  }

  SUBCASE("trip is inclusive at the margin") {
    const auto state = masked_line(1090.0, 14.0);
    const auto out = safety_mask({1e5, 2e5, 3e5}, state, cfg);
    CHECK(out[1] == 0.0);
  }

  SUBCASE("masked powers never exceed requested powers") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> temp(800.0, 1100.0);
    std::uniform_real_distribution<double> pos(4.0, 30.0);
    std::uniform_real_distribution<double> pw(0.0, 0.4e6);
    for (int i = 0; i < 200; ++i) {
      auto state = masked_line(temp(rng), pos(rng));
      for (double& t : state.bars[0].segment_temps) t = temp(rng);
      const std::array<double, 3> in{pw(rng), pw(rng), pw(rng)};
      const auto out = safety_mask(in, state, cfg);
      for (int k = 0; k < 3; ++k) {
        CHECK(out[k] <= in[k]);
        CHECK((out[k] == in[k] || out[k] == 0.0));
      }
      // No powered learnable zone covers a segment at/above the trip point.
      const auto& bar = state.bars[0];
      std::size_t kk = 0;
      for (const auto& zone : state.zones) {
        if (!zone.learnable) continue;
        if (out[kk] > 0.0) {
          for (int s = 0; s < bar.n_segments(); ++s) {
            const double lo = bar.tail_pos() + s * bar.segment_length;
            const double hi = lo + bar.segment_length;
            if (std::min(hi, zone.end) - std::max(lo, zone.start) > 0) {
              CHECK(bar.segment_temps[s] <
                    cfg.hard_max_temp - cfg.hard_mask_margin);
            }
          }
        }
        ++kk;
      }
    }
  }
}

TEST_CASE("reward") {
  RewardConfig cfg;

  SUBCASE("MAE of 1 degree gives zero evenness term") {
    const auto r = compute_reward({1071.0}, 0.0, 30.0, cfg);
    CHECK(r.even == doctest::Approx(0.0));
  }

  SUBCASE("MAE of 100 clips to -2") {
    const auto r = compute_reward({1170.0}, 0.0, 30.0, cfg);
    CHECK(r.even == doctest::Approx(-2.0));
  }

  SUBCASE("perfect profile clips to +1 via the MAE floor") {
    const auto r = compute_reward({1070.0, 1070.0}, 0.0, 30.0, cfg);
    CHECK(r.even == doctest::Approx(1.0));
  }

  SUBCASE("head at band end, MAE 1, no overheat totals 3") {
    const auto r = compute_reward({1071.0}, 30.0, 30.0, cfg);
    CHECK(r.total == doctest::Approx(3.0));
    CHECK(r.move == doctest::Approx(3.0));
    CHECK(r.heat == 0.0);
  }

  SUBCASE("overheat fires the constant penalty") {
    const auto r = compute_reward({1095.0}, 0.0, 30.0, cfg);
    CHECK(r.heat == -5.0);
  }

  SUBCASE("bounds hold over 1e5 randomized states") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> temp(20.0, 1100.0);
    std::uniform_real_distribution<double> head(-5.0, 35.0);
    std::uniform_int_distribution<int> n_seg(1, 40);
    for (int i = 0; i < 100000; ++i) {
      std::vector<double> temps(n_seg(rng));
      for (double& t : temps) t = temp(rng);
      const auto r = compute_reward(temps, head(rng), 30.0, cfg);
      CHECK(r.total >= -7.0);
      CHECK(r.total <= 4.0);
    }
  }
}

TEST_CASE("episode lifecycle") {
  RunConfig cfg;
  ForgingEnv env(cfg);

  SUBCASE("reset determinism") {
    const auto s1 = env.reset(Mode::kWarmHolding, 99);
    const auto s2 = env.reset(Mode::kWarmHolding, 99);
    CHECK(s1 == s2);
    const auto s3 = env.reset(Mode::kWarmHolding, 100);
    CHECK(s1 != s3);
  }

  SUBCASE("state dimension is segment count plus three") {
    CHECK(env.state_dim() == 43);
    CHECK(env.reset(Mode::kNormal, 1).size() == 43);
  }

  SUBCASE("warm-holding reset geometry and profile bounds") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      env.reset(Mode::kWarmHolding, seed);
      const auto& bar = env.line().bars.front();
      CHECK(bar.head_pos > cfg.bar_length);
      CHECK(bar.head_pos < cfg.band_length);
      for (double t : bar.segment_temps) {
        CHECK(t >= cfg.wh_profile_lo);
        CHECK(t <= cfg.wh_profile_hi);
      }
    }
  }

  SUBCASE("step before reset is rejected") {
    ForgingEnv fresh(cfg);
    CHECK_THROWS_AS((fresh.step({0.0, 0.0, 0.0})), std::logic_error);
  }

  SUBCASE("state stays fixed-length for the whole episode") {
    env.reset(Mode::kNormal, 5);
    while (!env.done()) {
      const auto r = env.step({0.5, 0.5, 0.5});
      CHECK(r.state.size() == 43);
    }
  }

  SUBCASE("episode ends when the bar leaves or at the horizon") {
    env.reset(Mode::kNormal, 5);
    int steps = 0;
    while (!env.done()) {
      env.step({0.0, 0.0, 0.0});
      ++steps;
    }
    // 4 m bar at 0.04 m/s across a 30 m band: gone by step 850.
    CHECK(steps == 850);
    CHECK(env.line().bars.empty());
    CHECK(env.pieces().size() == 8);
    CHECK_THROWS_AS((env.step({0.0, 0.0, 0.0})), std::logic_error);
  }

  SUBCASE("reward in step result matches recomputation from the twin") {
    env.reset(Mode::kNormal, 5);
    for (int i = 0; i < 300; ++i) {
      const auto before_pieces = env.pieces().size();
      const auto r = env.step({0.3, -0.2, 0.8});
      if (env.line().bars.empty()) break;
      const auto obs = twin::observe(env.line());
      if (env.pieces().size() == before_pieces) {
        const auto again =
            compute_reward(obs.segment_temps, obs.head_pos, cfg.band_length,
                           cfg.reward);
        CHECK(r.reward == doctest::Approx(again.total).epsilon(1e-12));
      }
    }
  }

  SUBCASE("episode determinism over seeds and actions") {
    auto run = [&cfg] {
      ForgingEnv e(cfg);
      e.reset(Mode::kWarmHolding, 21);
      double total = 0.0;
      std::mt19937_64 rng(4);
      std::uniform_real_distribution<double> act(-1.0, 1.0);
      while (!e.done()) {
        total += e.step({act(rng), act(rng), act(rng)}).reward;
      }
      return total;
    };
    CHECK(run() == run());
  }
}

TEST_CASE("mode dynamics through the wrapper") {
  RunConfig cfg;
  ForgingEnv env(cfg);

  SUBCASE("normal mode advances monotonically") {
    env.reset(Mode::kNormal, 1);
    double prev = env.line().bars.front().head_pos;
    for (int i = 0; i < 100; ++i) {
      env.step({0.0, 0.0, 0.0});
      const double cur = env.line().bars.front().head_pos;
      CHECK(cur > prev);
      prev = cur;
    }
  }

  SUBCASE("warm holding oscillates then resumes") {
    env.reset(Mode::kWarmHolding, 1);
    const double start = env.line().bars.front().head_pos;
    for (int i = 0; i < 496; ++i) env.step({0.0, 0.0, 0.0});
    CHECK(env.line().bars.front().head_pos ==
          doctest::Approx(start).epsilon(1e-9));
    for (int i = 496; i < 540; ++i) env.step({0.0, 0.0, 0.0});
    CHECK(std::holds_alternative<twin::Normal>(env.line().mode));
  }
}
