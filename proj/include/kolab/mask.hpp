#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kolab/layout.hpp"

namespace kolab {

enum class KnockoutType { None, LVK, VTK, VSK };

inline constexpr std::array<KnockoutType, 3> kKnockouts = {KnockoutType::LVK, KnockoutType::VTK,
                                                          KnockoutType::VSK};

// One-letter schedule code: N, L, T, S.
char code_of(KnockoutType kt);
// Report name: none, LV-K, VT-K, VS-K.
std::string_view name_of(KnockoutType kt);
// Accepts the code letter or the report name (case-insensitive, dash optional).
KnockoutType parse_knockout(std::string_view text);

// Frame tag used by the kernels: frame index for video tokens, -1 for text.
inline int frame_tag(const TokenRole& role) {
  if (const auto* v = std::get_if<VideoToken>(&role)) return v->frame;
  return -1;
}

// True when the knockout removes the query->key edge. Says nothing about
// causality or the diagonal; callers combine it with both.
inline bool edge_blocked(KnockoutType kt, int query_frame, int key_frame) {
  switch (kt) {
    case KnockoutType::None: return false;
    case KnockoutType::LVK: return query_frame < 0 && key_frame >= 0;
    case KnockoutType::VTK: return query_frame >= 0 && key_frame >= 0 && query_frame != key_frame;
    case KnockoutType::VSK: return query_frame >= 0 && query_frame == key_frame;
  }
  return false;
}

// Allowed edge between two positions of an ordered token sequence. `frames`
// holds frame tags in sequence order. The diagonal is always kept.
inline bool sequence_allowed(KnockoutType kt, std::span<const int> frames, int q, int k) {
  if (k > q) return false;
  if (k == q) return true;
  return !edge_blocked(kt, frames[q], frames[k]);
}

struct AttentionRule {
  TokenLayout layout;
  KnockoutType knockout = KnockoutType::None;
};

// Rule-form predicate on absolute indices. Throws Error(Bounds).
bool allowed(const AttentionRule& rule, int q, int k);

inline constexpr int kMaxDenseMask = 16384;

// Dense additive mask: 0 where allowed, -inf where blocked. Row-major size x size.
struct AdditiveMask {
  int size = 0;
  std::vector<float> values;

  float at(int q, int k) const { return values[static_cast<size_t>(q) * size + k]; }
};

// Throws Error(TooLarge) above kMaxDenseMask tokens.
AdditiveMask materialize_mask(const AttentionRule& rule);
AdditiveMask materialize_mask(std::span<const int> frames, KnockoutType kt);

std::vector<int> frame_tags(const TokenLayout& layout);

}  // namespace kolab
