#include "kolab/schedule.hpp"

#include <algorithm>
#include <charconv>

#include "kolab/error.hpp"

namespace kolab {

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorKind::InvalidSchedule, message);
}

void check_depth(int depth) {
  if (depth < 1) invalid("schedule depth must be >= 1, got " + std::to_string(depth));
}

}  // namespace

bool LayerSchedule::is_baseline() const {
  if (exit_layer && *exit_layer < depth()) return false;
  return std::all_of(per_layer.begin(), per_layer.end(),
                     [](KnockoutType kt) { return kt == KnockoutType::None; });
}

void validate(const LayerSchedule& schedule) {
  check_depth(schedule.depth());
  if (schedule.exit_layer && (*schedule.exit_layer < 1 || *schedule.exit_layer > schedule.depth())) {
    invalid("exit layer " + std::to_string(*schedule.exit_layer) + " outside [1, " +
            std::to_string(schedule.depth()) + "]");
  }
}

LayerSchedule baseline_schedule(int depth) {
  check_depth(depth);
  return LayerSchedule{std::vector<KnockoutType>(static_cast<size_t>(depth), KnockoutType::None),
                       std::nullopt};
}

LayerSchedule schedule_global1(int depth, int cutoff) {
  check_depth(depth);
  if (cutoff < 1 || cutoff > depth) {
    invalid("cutoff " + std::to_string(cutoff) + " outside [1, " + std::to_string(depth) + "]");
  }
  LayerSchedule s = baseline_schedule(depth);
  for (int layer = cutoff + 1; layer <= depth; ++layer) s.per_layer[layer - 1] = KnockoutType::LVK;
  return s;
}

LayerSchedule schedule_global2(int depth, KnockoutType kt) {
  check_depth(depth);
  if (kt == KnockoutType::None) {
    invalid("global setting 2 needs a knockout type; use cutoff = depth for the baseline");
  }
  return LayerSchedule{std::vector<KnockoutType>(static_cast<size_t>(depth), kt), std::nullopt};
}

LayerSchedule schedule_window(int depth, KnockoutType kt, int window_end, int window_len) {
  check_depth(depth);
  if (window_len < 1) invalid("window length must be >= 1");
  if (window_end < window_len || window_end > depth) {
    invalid("window end " + std::to_string(window_end) + " outside [" + std::to_string(window_len) +
            ", " + std::to_string(depth) + "]");
  }
  LayerSchedule s = baseline_schedule(depth);
  for (int layer = window_end - window_len + 1; layer <= window_end; ++layer) {
    s.per_layer[layer - 1] = kt;
  }
  return s;
}

LayerSchedule schedule_efficiency(int depth, int spatial_window_end, int exit_layer) {
  check_depth(depth);
  if (spatial_window_end < 0 || spatial_window_end > exit_layer || exit_layer > depth) {
    invalid("efficiency schedule needs 0 <= spatial window (" + std::to_string(spatial_window_end) +
            ") <= exit (" + std::to_string(exit_layer) + ") <= depth (" + std::to_string(depth) +
            ")");
  }
  if (exit_layer < 1) invalid("exit layer must be >= 1");
  LayerSchedule s = baseline_schedule(depth);
  for (int layer = 1; layer <= spatial_window_end; ++layer) s.per_layer[layer - 1] = KnockoutType::VTK;
  for (int layer = exit_layer + 1; layer <= depth; ++layer) s.per_layer[layer - 1] = KnockoutType::LVK;
  // Exiting after the last layer removes nothing.
  if (exit_layer < depth) s.exit_layer = exit_layer;
  return s;
}

std::string render_schedule(const LayerSchedule& schedule) {
  std::string out;
  for (KnockoutType kt : schedule.per_layer) {
    if (!out.empty()) out.push_back(' ');
    out.push_back(code_of(kt));
  }
  if (schedule.exit_layer) out += " exit=" + std::to_string(*schedule.exit_layer);
  return out;
}

LayerSchedule parse_schedule(std::string_view text) {
  LayerSchedule s;
  size_t i = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\n'; };
  while (i < text.size()) {
    while (i < text.size() && is_sep(text[i])) ++i;
    if (i >= text.size()) break;
    size_t j = i;
    while (j < text.size() && !is_sep(text[j])) ++j;
    const std::string_view token = text.substr(i, j - i);
    i = j;
    if (token.starts_with("exit=")) {
      if (s.exit_layer) throw Error(ErrorKind::Parse, "duplicate exit= token");
      int value = 0;
      const auto digits = token.substr(5);
      const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc() || end != digits.data() + digits.size()) {
        throw Error(ErrorKind::Parse, "bad exit layer in '" + std::string(token) + "'");
      }
      s.exit_layer = value;
      continue;
    }
    if (s.exit_layer) throw Error(ErrorKind::Parse, "exit= must be the last token");
    // Letters may also be run together ("NNLL").
    for (char c : token) {
      switch (c) {
        case 'N': case 'n': s.per_layer.push_back(KnockoutType::None); break;
        case 'L': case 'l': s.per_layer.push_back(KnockoutType::LVK); break;
        case 'T': case 't': s.per_layer.push_back(KnockoutType::VTK); break;
        case 'S': case 's': s.per_layer.push_back(KnockoutType::VSK); break;
        default:
          throw Error(ErrorKind::Parse, "unknown schedule token '" + std::string(token) + "'");
      }
    }
  }
  if (s.per_layer.empty()) throw Error(ErrorKind::Parse, "empty schedule string");
  if (s.exit_layer && (*s.exit_layer < 1 || *s.exit_layer > s.depth())) {
    throw Error(ErrorKind::Parse, "exit layer outside [1, " + std::to_string(s.depth()) + "]");
  }
  return s;
}

}  // namespace kolab
