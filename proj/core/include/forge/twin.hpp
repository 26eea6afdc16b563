#pragma once

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "forge/physics.hpp"

// Discrete-event simulator of the heating line. Bars travel through a row
// of powered zones; every step moves the bars, heats the covered segments,
// and shears finished pieces off the end of the band.

namespace forge::twin {

struct Zone {
  int index = 0;        // 1-based
  double start = 0.0;   // m
  double end = 0.0;     // m
  double power = 0.0;   // W, current setting
  double p_max = 0.0;   // W
  bool learnable = false;

  double length() const { return end - start; }
};

// Durations of the alternating back/forward turns during warm holding.
// The first turn moves backward. When cyclic, the pattern repeats; when
// not, the bar stands still after the last turn.
struct TurnPattern {
  std::vector<double> turn_durations;  // s, each > 0
  bool cyclic = false;

  double total() const;
};

struct Normal {
  double speed = 0.04;  // m/s
};

struct WarmHolding {
  double speed = 0.04;         // m/s while oscillating
  TurnPattern pattern;
  double hold_duration = 540;  // s, then the mode switches to Normal
  double resume_speed = 0.04;  // m/s after the switch
};

using MovementMode = std::variant<Normal, WarmHolding>;

struct Piece {
  int piece_index = 0;
  double exit_time = 0.0;
  std::vector<double> temps;  // segment temperatures at the cut, tail-first
};

struct HistoryEntry {
  double time;
  double head_pos;
  std::vector<double> segment_temps;
};

struct SteelBar {
  int id = 0;
  double segment_length = 0.1;        // m
  double head_pos = 0.0;              // m, leading end
  std::vector<double> segment_temps;  // degC, index 0 is the tail segment
  physics::MaterialParams material;
  std::vector<HistoryEntry> history;

  int n_segments() const { return static_cast<int>(segment_temps.size()); }
  double length() const { return n_segments() * segment_length; }
  double tail_pos() const { return head_pos - length(); }
  double segment_mass() const;
};

struct LineState {
  double time = 0.0;
  long step_index = 0;
  double dt = 1.0;
  double band_length = 30.0;
  MovementMode mode = Normal{};
  std::vector<Zone> zones;  // non-overlapping, ordered by start
  std::vector<SteelBar> bars;  // ordered, bars[0] leads
  std::vector<Piece> sheared_pieces;
  physics::Environment ambient;
  double piece_length = 0.5;  // m
  bool record_history = true;
  double warm_hold_elapsed = 0.0;
  // Histories of bars that were fully consumed, keyed by bar id.
  std::vector<std::pair<int, std::vector<HistoryEntry>>> retired_histories;
};

struct RawObservation {
  std::vector<double> segment_temps;  // tail-first
  double head_pos;
  double tail_pos;
  long step_index;
  double time;
};

// Moves every bar according to the current mode. In warm holding the
// direction flips at the cumulative turn boundaries; once hold_duration has
// elapsed the mode switches to Normal. Throws std::runtime_error if a
// backward move would push a bar's tail below position 0.
void advance_movement(LineState& state);

// Distributes each zone's power over the segments it covers, proportional
// to overlap length (share = P * overlap / zone_length), and steps the
// segment physics. Uncovered segments cool.
void apply_heating(LineState& state);

// Cuts a piece whenever a bar protrudes at least piece_length beyond the
// band end; fully consumed bars are dropped but their histories retained.
void shear_and_remove(LineState& state);

// One simulator step: set powers, move, heat, shear, advance time, record
// history. powers must match zones in size, lie in [0, p_max], and leave
// non-learnable zones at their current setting.
void step(LineState& state, const std::vector<double>& powers);

// Observation of the lead bar. Throws std::runtime_error on an empty line.
RawObservation observe(const LineState& state);

// Writes a bar history as CSV: time_s, head_pos_m, seg_000...
void export_history_csv(const std::vector<HistoryEntry>& history,
                        std::ostream& out);

}  // namespace forge::twin
