#include "forge/twin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace forge::twin {

double TurnPattern::total() const {
  return std::accumulate(turn_durations.begin(), turn_durations.end(), 0.0);
}

double SteelBar::segment_mass() const {
  // The bar is specified by dimensions and total mass, not density, so the
  // segment mass is the whole-bar mass split evenly.
  return material.bar_mass / static_cast<double>(n_segments());
}

namespace {

// Signed displacement multiplier (in seconds of travel) over [elapsed,
// elapsed + dt] of the warm-holding pattern. Turn 0 moves backward and the
// direction alternates. Past the end of a non-cyclic pattern the bar is
// stationary.
double signed_travel(const TurnPattern& pattern, double elapsed, double dt) {
  const double total = pattern.total();
  double travel = 0.0;
  double t = elapsed;
  double remaining = dt;
  while (remaining > 1e-12) {
    double tp = t;
    if (pattern.cyclic) {
      tp = std::fmod(tp, total);
    } else if (tp >= total - 1e-12) {
      break;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pattern.turn_durations.size(); ++i) {
      const double d = pattern.turn_durations[i];
      if (tp < acc + d) {
        const double h = std::min(remaining, acc + d - tp);
        const double dir = (i % 2 == 0) ? -1.0 : 1.0;
        travel += dir * h;
        t += h;
        remaining -= h;
        break;
      }
      acc += d;
    }
  }
  return travel;
}

void move_bars(LineState& state, double displacement) {
  if (displacement < 0) {
    for (const SteelBar& bar : state.bars) {
      if (bar.tail_pos() + displacement < 0) {
        throw std::runtime_error(
            "advance_movement: backward move would push bar tail below 0");
      }
    }
  }
  for (SteelBar& bar : state.bars) {
    bar.head_pos += displacement;
  }
}

}  // namespace

void advance_movement(LineState& state) {
  if (const Normal* normal = std::get_if<Normal>(&state.mode)) {
    move_bars(state, normal->speed * state.dt);
    return;
  }
  WarmHolding& wh = std::get<WarmHolding>(state.mode);
  const double travel =
      signed_travel(wh.pattern, state.warm_hold_elapsed, state.dt);
  move_bars(state, travel * wh.speed);
  state.warm_hold_elapsed += state.dt;
  if (state.warm_hold_elapsed >= wh.hold_duration - 1e-12) {
    state.mode = Normal{wh.resume_speed};
    state.warm_hold_elapsed = 0.0;
  }
}

void apply_heating(LineState& state) {
  for (SteelBar& bar : state.bars) {
    const double seg_len = bar.segment_length;
    const double seg_mass = bar.segment_mass();
    const double tail = bar.tail_pos();
    for (int i = 0; i < bar.n_segments(); ++i) {
      const double lo = tail + i * seg_len;
      const double hi = lo + seg_len;
      double share = 0.0;
      for (const Zone& zone : state.zones) {
        const double overlap =
            std::min(hi, zone.end) - std::max(lo, zone.start);
        if (overlap > 0) {
          share += zone.power * overlap / zone.length();
        }
      }
      physics::Segment seg{bar.segment_temps[i], seg_len, seg_mass};
      bar.segment_temps[i] =
          physics::step_segment(seg, share, bar.material, state.ambient,
                                state.dt)
              .temperature;
    }
  }
}

void shear_and_remove(LineState& state) {
  for (auto it = state.bars.begin(); it != state.bars.end();) {
    SteelBar& bar = *it;
    const int per_piece =
        static_cast<int>(std::llround(state.piece_length / bar.segment_length));
    if (per_piece < 1 ||
        std::abs(per_piece * bar.segment_length - state.piece_length) > 1e-9) {
      throw std::logic_error(
          "shear_and_remove: piece_length must be a multiple of the segment "
          "length");
    }
    // Tolerance absorbs accumulated rounding from the per-step position sum.
    while (bar.n_segments() > 0 &&
           bar.head_pos - state.band_length >= state.piece_length - 1e-9) {
      const int n = bar.n_segments();
      const int k = std::min(per_piece, n);
      Piece piece;
      piece.piece_index = static_cast<int>(state.sheared_pieces.size()) + 1;
      piece.exit_time = state.time;
      piece.temps.assign(bar.segment_temps.end() - k, bar.segment_temps.end());
      state.sheared_pieces.push_back(std::move(piece));
      bar.segment_temps.resize(n - k);
      bar.head_pos -= k * bar.segment_length;
    }
    if (bar.n_segments() == 0) {
      state.retired_histories.emplace_back(bar.id, std::move(bar.history));
      it = state.bars.erase(it);
    } else {
      ++it;
    }
  }
}

void step(LineState& state, const std::vector<double>& powers) {
  if (powers.size() != state.zones.size()) {
    throw std::invalid_argument("step: powers size must match zone count");
  }
  for (std::size_t i = 0; i < powers.size(); ++i) {
    Zone& zone = state.zones[i];
    if (powers[i] < 0 || powers[i] > zone.p_max) {
      throw std::invalid_argument("step: power out of [0, p_max] for zone " +
                                  std::to_string(zone.index));
    }
    if (!zone.learnable && powers[i] != zone.power) {
      throw std::invalid_argument(
          "step: attempt to change power of fixed zone " +
          std::to_string(zone.index));
    }
    zone.power = powers[i];
  }
  advance_movement(state);
  apply_heating(state);
  shear_and_remove(state);
  state.time += state.dt;
  state.step_index += 1;
  if (state.record_history) {
    for (SteelBar& bar : state.bars) {
      bar.history.push_back({state.time, bar.head_pos, bar.segment_temps});
    }
  }
}

RawObservation observe(const LineState& state) {
  if (state.bars.empty()) {
    throw std::runtime_error("observe: no bar on the line");
  }
  const SteelBar* lead = &state.bars.front();
  for (const SteelBar& bar : state.bars) {
    if (bar.head_pos > lead->head_pos) lead = &bar;
  }
  return {lead->segment_temps, lead->head_pos, lead->tail_pos(),
          state.step_index, state.time};
}

void export_history_csv(const std::vector<HistoryEntry>& history,
                        std::ostream& out) {
  const std::size_t n = history.empty() ? 0 : history[0].segment_temps.size();
  out << "time_s,head_pos_m";
  for (std::size_t i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), ",seg_%03zu", i);
    out << buf;
  }
  out << "\n";
  char num[32];
  for (const HistoryEntry& entry : history) {
    std::snprintf(num, sizeof(num), "%.17g", entry.time);
    out << num;
    std::snprintf(num, sizeof(num), ",%.17g", entry.head_pos);
    out << num;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = i < entry.segment_temps.size() ? entry.segment_temps[i]
                                                      : 0.0;
      std::snprintf(num, sizeof(num), ",%.17g", t);
      out << num;
    }
    out << "\n";
  }
}

}  // namespace forge::twin
