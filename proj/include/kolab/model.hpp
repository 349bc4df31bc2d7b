#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kolab/layout.hpp"
#include "kolab/schedule.hpp"

namespace kolab {

struct ModelConfig {
  int depth = 4;
  int model_dim = 32;
  int head_count = 4;
  int ffn_dim = 64;
  int vocab_size = 128;
  std::uint64_t seed = 0;
  // Head dims rotated by the position encoding; unset means the whole head
  // (rounded down to even). Hand-built circuits use 0.
  std::optional<int> rotary_dims;
  double rope_base = 10000.0;

  int head_dim() const { return model_dim / head_count; }
  int effective_rotary_dims() const;
};

// Throws Error(Config) on non-positive dims or model_dim % head_count != 0.
void validate(const ModelConfig& config);

struct LayerWeights {
  std::vector<float> attn_norm;  // [d]
  std::vector<float> wq, wk, wv, wo;  // [d][d]
  std::vector<float> ffn_norm;  // [d]
  std::vector<float> w_in;   // [ffn][d]
  std::vector<float> w_out;  // [d][ffn]
};

struct ToyTransformer {
  ModelConfig config;
  std::vector<float> embedding;  // [vocab][d]
  std::vector<LayerWeights> layers;
  std::vector<float> final_norm;  // [d]
  std::vector<float> unembedding;  // [vocab][d]

  // FNV-1a over every weight byte, in declaration order.
  std::uint64_t checksum() const;
};

// Scaled-uniform weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)) from mt19937_64
// seeded with config.seed; embeddings U(-1, 1); norm gains 1.
ToyTransformer init_model(const ModelConfig& config);
// Zero weights with unit norm gains, for hand construction.
ToyTransformer zero_model(const ModelConfig& config);

// One token of an ordered input: id, rotary position id, and its role in the
// multimodal layout. Sub-sequences keep the position ids of the full layout.
struct TokenSlot {
  int id = 0;
  int position = 0;
  TokenRole role;
};

using Sequence = std::vector<TokenSlot>;

// Full layout sequence: position id = absolute index.
Sequence make_sequence(const TokenLayout& layout, std::span<const int> tokens);
Sequence text_only(const Sequence& seq);
Sequence frame_only(const Sequence& seq, int frame);

enum class Backend { Parallel, Reference };

struct ForwardOptions {
  Backend backend = Backend::Parallel;
  bool capture_hidden = false;
  bool capture_attention = false;
};

// Residual stream after one layer, for the tokens still live at that layer.
struct LayerState {
  std::vector<int> positions;
  std::vector<float> values;  // [positions.size()][d]
};

struct AttentionProbe {
  std::vector<int> positions;  // live tokens, in order
  std::vector<float> probs;    // [head][query][key]
};

struct ForwardTrace {
  int vocab_size = 0;
  std::vector<int> text_positions;  // one logit row per text token
  std::vector<float> logits;        // [text][vocab]
  std::vector<LayerState> hidden;   // index 0 = embeddings, l = after layer l
  std::vector<AttentionProbe> attention;  // index l-1 = layer l

  std::span<const float> final_logits() const;
  std::span<const float> logits_at(int text_row) const;
};

// Runs the schedule. Layer l masks with schedule.at(l); with exit_layer e set,
// video tokens leave the computation after layer e. Logits are produced for
// text tokens only. Throws Error(Shape) on depth or length mismatch.
ForwardTrace forward(const ToyTransformer& model, const Sequence& seq, const LayerSchedule& schedule,
                     const ForwardOptions& options = {});
ForwardTrace forward(const ToyTransformer& model, std::span<const int> tokens,
                     const TokenLayout& layout, const LayerSchedule& schedule,
                     const ForwardOptions& options = {});

struct OptionScores {
  int chosen = 0;
  std::vector<float> scores;
};

// Final-position logit of each option id; ties go to the lowest index.
// Throws Error(Usage) with fewer than two options.
OptionScores score_options(const ToyTransformer& model, std::span<const int> tokens,
                           const TokenLayout& layout, const LayerSchedule& schedule,
                           std::span<const int> options);
OptionScores pick_option(std::span<const float> final_logits, std::span<const int> options);

// max |a - b| / max |b|; the normwise relative error used by the oracles.
double relative_difference(std::span<const float> a, std::span<const float> b);

}  // namespace kolab
