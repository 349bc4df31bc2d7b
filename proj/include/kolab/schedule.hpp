#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kolab/mask.hpp"

namespace kolab {

// Per-layer knockout assignment. Layers are 1-based in every public API;
// `per_layer[0]` is layer 1. When `exit_layer` is set to e, video tokens are
// dropped from computation after layer e.
struct LayerSchedule {
  std::vector<KnockoutType> per_layer;
  std::optional<int> exit_layer;

  int depth() const { return static_cast<int>(per_layer.size()); }
  KnockoutType at(int layer) const { return per_layer.at(static_cast<size_t>(layer - 1)); }
  bool video_present(int layer) const { return !exit_layer || layer <= *exit_layer; }
  bool is_baseline() const;

  bool operator==(const LayerSchedule&) const = default;
};

// Throws Error(InvalidSchedule) if empty or exit_layer outside [1, depth].
void validate(const LayerSchedule& schedule);

LayerSchedule baseline_schedule(int depth);

// Eq. "cutoff": layers <= cutoff untouched, LV-K after.
LayerSchedule schedule_global1(int depth, int cutoff);
// One knockout type on every layer. NoKnockout is rejected.
LayerSchedule schedule_global2(int depth, KnockoutType kt);
// Knockout on layers window_end-window_len+1 .. window_end.
LayerSchedule schedule_window(int depth, KnockoutType kt, int window_end, int window_len = 4);
// VT-K on layers 1..spatial_window_end, untouched up to exit_layer, then
// video exits (LV-K recorded on the remaining layers).
LayerSchedule schedule_efficiency(int depth, int spatial_window_end, int exit_layer);

// Compact form: "N N L L exit=2".
std::string render_schedule(const LayerSchedule& schedule);
// Accepts whitespace- or comma-separated codes plus an optional exit=K
// token. Throws Error(Parse).
LayerSchedule parse_schedule(std::string_view text);

}  // namespace kolab
