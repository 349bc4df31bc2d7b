#pragma once

#include <cstdint>
#include <variant>

namespace kolab {

struct VideoToken {
  int frame = 0;  // 0-based frame index
  int local = 0;  // 0-based index inside the frame
  bool operator==(const VideoToken&) const = default;
};

struct TextToken {
  int offset = 0;  // 0-based offset inside the text span
  bool operator==(const TextToken&) const = default;
};

using TokenRole = std::variant<VideoToken, TextToken>;

inline bool is_video(const TokenRole& role) { return std::holds_alternative<VideoToken>(role); }
inline bool is_text(const TokenRole& role) { return std::holds_alternative<TextToken>(role); }

// N frames of P tokens each, followed by T text tokens. Absolute index of
// Video(f, k) is f*P + k; Text(t) sits at N*P + t.
class TokenLayout {
 public:
  int num_frames() const { return num_frames_; }
  int tokens_per_frame() const { return tokens_per_frame_; }
  int text_len() const { return text_len_; }
  int video_len() const { return num_frames_ * tokens_per_frame_; }
  int total_len() const { return video_len() + text_len_; }

  bool is_video_index(int index) const { return index < video_len(); }

  bool operator==(const TokenLayout&) const = default;

 private:
  friend TokenLayout build_layout(int, int, int);
  TokenLayout(int frames, int per_frame, int text)
      : num_frames_(frames), tokens_per_frame_(per_frame), text_len_(text) {}

  int num_frames_;
  int tokens_per_frame_;
  int text_len_;
};

// Throws Error(InvalidLayout) unless frames >= 1, per_frame >= 1, text >= 0.
TokenLayout build_layout(int num_frames, int tokens_per_frame, int text_len);

// Throws Error(Bounds) for index outside [0, total_len).
TokenRole role_of(const TokenLayout& layout, int index);

// Inverse of role_of. Throws Error(Bounds) if the role does not fit the layout.
int index_of(const TokenLayout& layout, const TokenRole& role);

}  // namespace kolab
