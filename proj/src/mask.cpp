#include "kolab/mask.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "kolab/error.hpp"

namespace kolab {

char code_of(KnockoutType kt) {
  switch (kt) {
    case KnockoutType::None: return 'N';
    case KnockoutType::LVK: return 'L';
    case KnockoutType::VTK: return 'T';
    case KnockoutType::VSK: return 'S';
  }
  return '?';
}

std::string_view name_of(KnockoutType kt) {
  switch (kt) {
    case KnockoutType::None: return "none";
    case KnockoutType::LVK: return "LV-K";
    case KnockoutType::VTK: return "VT-K";
    case KnockoutType::VSK: return "VS-K";
  }
  return "?";
}

KnockoutType parse_knockout(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (key == "N" || key == "NONE") return KnockoutType::None;
  if (key == "L" || key == "LVK") return KnockoutType::LVK;
  if (key == "T" || key == "VTK") return KnockoutType::VTK;
  if (key == "S" || key == "VSK") return KnockoutType::VSK;
  throw Error(ErrorKind::Parse, "unknown knockout type '" + std::string(text) + "'");
}

bool allowed(const AttentionRule& rule, int q, int k) {
  const int s = rule.layout.total_len();
  if (q < 0 || q >= s || k < 0 || k >= s) {
    throw Error(ErrorKind::Bounds, "pair (" + std::to_string(q) + ", " + std::to_string(k) +
                                       ") outside sequence of length " + std::to_string(s));
  }
  if (k > q) return false;
  if (k == q) return true;
  return !edge_blocked(rule.knockout, frame_tag(role_of(rule.layout, q)),
                       frame_tag(role_of(rule.layout, k)));
}

std::vector<int> frame_tags(const TokenLayout& layout) {
  std::vector<int> tags(static_cast<size_t>(layout.total_len()), -1);
  const int p = layout.tokens_per_frame();
  for (int i = 0; i < layout.video_len(); ++i) tags[i] = i / p;
  return tags;
}

AdditiveMask materialize_mask(std::span<const int> frames, KnockoutType kt) {
  const int n = static_cast<int>(frames.size());
  if (n > kMaxDenseMask) {
    throw Error(ErrorKind::TooLarge, "dense mask of " + std::to_string(n) +
                                         " tokens exceeds the limit of " +
                                         std::to_string(kMaxDenseMask) + "; use the rule form");
  }
  AdditiveMask mask;
  mask.size = n;
  mask.values.assign(static_cast<size_t>(n) * n, -std::numeric_limits<float>::infinity());
  for (int q = 0; q < n; ++q) {
    for (int k = 0; k <= q; ++k) {
      if (sequence_allowed(kt, frames, q, k)) mask.values[static_cast<size_t>(q) * n + k] = 0.0f;
    }
  }
  return mask;
}

AdditiveMask materialize_mask(const AttentionRule& rule) {
  if (rule.layout.total_len() > kMaxDenseMask) {
    throw Error(ErrorKind::TooLarge, "dense mask of " + std::to_string(rule.layout.total_len()) +
                                         " tokens exceeds the limit; use the rule form");
  }
  const auto tags = frame_tags(rule.layout);
  return materialize_mask(tags, rule.knockout);
}

}  // namespace kolab
