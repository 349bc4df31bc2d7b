#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kolab/layout.hpp"
#include "kolab/schedule.hpp"

namespace kolab {

// Attention cost is counted in causally allowed query-key pairs. Both the
// score product and the value mix scale with that count, so the 2*d factors
// cancel in every ratio reported here.
inline constexpr const char* kCostConvention =
    "cost unit = causally allowed query-key pairs per layer (QK^T and AV FLOPs "
    "both proportional; FFN and projections excluded)";

enum class CostView {
  Skipped,  // blocked pairs are not computed
  Dense,    // masks are applied to a full causal product; only exits save work
};

// Closed-form pair count for one layer.
std::uint64_t layer_pair_count(const TokenLayout& layout, KnockoutType kt, bool video_present,
                               CostView view = CostView::Skipped);

struct PairCount {
  std::vector<std::uint64_t> per_layer;
  std::uint64_t total = 0;
  std::uint64_t baseline_total = 0;
};

PairCount schedule_pair_count(const TokenLayout& layout, const LayerSchedule& schedule,
                              CostView view = CostView::Skipped);

// Exact ratio total / baseline_total.
struct FlopsRatio {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  double percent() const { return 100.0 * value(); }
  // One decimal, e.g. "64.3%".
  std::string to_string() const;
};

FlopsRatio schedule_flops_ratio(const TokenLayout& layout, const LayerSchedule& schedule,
                                CostView view = CostView::Skipped);

struct FlopsRow {
  int layer = 0;
  KnockoutType knockout = KnockoutType::None;
  bool video_present = true;
  std::uint64_t pairs = 0;
  double cumulative_ratio = 0.0;  // running total / (depth * baseline layer)
};

std::vector<FlopsRow> flops_table(const TokenLayout& layout, const LayerSchedule& schedule,
                                  CostView view = CostView::Skipped);

}  // namespace kolab
