#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kolab/model.hpp"

namespace kolab {

// Final text logits keyed by what produced them. Stored as text with hex
// floats so the values survive the round trip exactly.
struct GoldenTrace {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::uint64_t input_hash = 0;
  std::string schedule;
  int vocab_size = 0;
  std::vector<float> logits;  // [text][vocab]

  bool same_key(const GoldenTrace& other) const {
    return config_hash == other.config_hash && seed == other.seed &&
           input_hash == other.input_hash && schedule == other.schedule;
  }
};

// Hash of the shape fields of a config (seed excluded; it is keyed separately).
std::uint64_t config_hash(const ModelConfig& config);
std::uint64_t input_hash(const TokenLayout& layout, std::span<const int> tokens);

GoldenTrace make_golden(const ModelConfig& config, const TokenLayout& layout,
                        std::span<const int> tokens, const LayerSchedule& schedule,
                        const ForwardTrace& trace);

void write_golden(const GoldenTrace& golden, const std::string& path);
// Throws Error(Io) or Error(Parse).
GoldenTrace read_golden(const std::string& path);

}  // namespace kolab
