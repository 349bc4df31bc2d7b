#include "kolab/flops.hpp"

#include <cstdio>

namespace kolab {

namespace {

std::uint64_t triangle(std::uint64_t n) { return n * (n + 1) / 2; }

}  // namespace

std::uint64_t layer_pair_count(const TokenLayout& layout, KnockoutType kt, bool video_present,
                               CostView view) {
  const std::uint64_t n = static_cast<std::uint64_t>(layout.num_frames());
  const std::uint64_t p = static_cast<std::uint64_t>(layout.tokens_per_frame());
  const std::uint64_t t = static_cast<std::uint64_t>(layout.text_len());
  const std::uint64_t video = n * p;
  if (!video_present) return triangle(t);
  const std::uint64_t text_terms = t * video + triangle(t);
  if (view == CostView::Dense) return triangle(video + t);
  switch (kt) {
    case KnockoutType::None:
      return triangle(video + t);
    case KnockoutType::LVK:
      return triangle(video + t) - t * video;
    case KnockoutType::VTK:
      // within-frame causal blocks only
      return n * triangle(p) + text_terms;
    case KnockoutType::VSK:
      // earlier frames in full, plus the diagonal
      return p * p * (n * (n - 1) / 2) + video + text_terms;
  }
  return 0;
}

PairCount schedule_pair_count(const TokenLayout& layout, const LayerSchedule& schedule,
                              CostView view) {
  validate(schedule);
  PairCount out;
  const std::uint64_t base = layer_pair_count(layout, KnockoutType::None, true);
  for (int layer = 1; layer <= schedule.depth(); ++layer) {
    const auto c = layer_pair_count(layout, schedule.at(layer), schedule.video_present(layer), view);
    out.per_layer.push_back(c);
    out.total += c;
    out.baseline_total += base;
  }
  return out;
}

std::string FlopsRatio::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", percent());
  return buf;
}

FlopsRatio schedule_flops_ratio(const TokenLayout& layout, const LayerSchedule& schedule,
                                CostView view) {
  const PairCount c = schedule_pair_count(layout, schedule, view);
  return {c.total, c.baseline_total};
}

std::vector<FlopsRow> flops_table(const TokenLayout& layout, const LayerSchedule& schedule,
                                  CostView view) {
  const PairCount c = schedule_pair_count(layout, schedule, view);
  std::vector<FlopsRow> rows;
  std::uint64_t running = 0;
  for (int layer = 1; layer <= schedule.depth(); ++layer) {
    const auto pairs = c.per_layer[layer - 1];
    running += pairs;
    rows.push_back({layer, schedule.at(layer), schedule.video_present(layer), pairs,
                    static_cast<double>(running) / static_cast<double>(c.baseline_total)});
  }
  return rows;
}

}  // namespace kolab
