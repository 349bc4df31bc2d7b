#include "kolab/layout.hpp"

#include <limits>
#include <string>

#include "kolab/error.hpp"

namespace kolab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidLayout: return "invalid-layout";
    case ErrorKind::Bounds: return "bounds";
    case ErrorKind::InvalidSchedule: return "invalid-schedule";
    case ErrorKind::TooLarge: return "too-large";
    case ErrorKind::Config: return "config";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::UndefinedRatio: return "undefined-ratio";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::Task: return "task";
  }
  return "unknown";
}

TokenLayout build_layout(int num_frames, int tokens_per_frame, int text_len) {
  if (num_frames < 1 || tokens_per_frame < 1 || text_len < 0) {
    throw Error(ErrorKind::InvalidLayout,
                "layout needs frames >= 1, tokens_per_frame >= 1, text_len >= 0 (got " +
                    std::to_string(num_frames) + ", " + std::to_string(tokens_per_frame) + ", " +
                    std::to_string(text_len) + ")");
  }
  const long long total =
      static_cast<long long>(num_frames) * tokens_per_frame + static_cast<long long>(text_len);
  if (total > std::numeric_limits<int>::max()) {
    throw Error(ErrorKind::InvalidLayout, "layout length overflows int");
  }
  return TokenLayout(num_frames, tokens_per_frame, text_len);
}

TokenRole role_of(const TokenLayout& layout, int index) {
  if (index < 0 || index >= layout.total_len()) {
    throw Error(ErrorKind::Bounds, "token index " + std::to_string(index) + " outside [0, " +
                                       std::to_string(layout.total_len()) + ")");
  }
  const int video = layout.video_len();
  if (index < video) {
    const int p = layout.tokens_per_frame();
    return VideoToken{index / p, index % p};
  }
  return TextToken{index - video};
}

int index_of(const TokenLayout& layout, const TokenRole& role) {
  if (const auto* v = std::get_if<VideoToken>(&role)) {
    if (v->frame < 0 || v->frame >= layout.num_frames() || v->local < 0 ||
        v->local >= layout.tokens_per_frame()) {
      throw Error(ErrorKind::Bounds, "video role outside layout");
    }
    return v->frame * layout.tokens_per_frame() + v->local;
  }
  const auto& t = std::get<TextToken>(role);
  if (t.offset < 0 || t.offset >= layout.text_len()) {
    throw Error(ErrorKind::Bounds, "text role outside layout");
  }
  return layout.video_len() + t.offset;
}

}  // namespace kolab
