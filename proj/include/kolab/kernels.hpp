#pragma once

#include <span>

#include "kolab/mask.hpp"

// Numeric kernels behind the toy transformer. Two implementations share one
// signature set: `reference` is the plain serial code and takes a dense
// additive mask; `parallel` uses OpenMP and evaluates the knockout rule
// inline, skipping blocked keys. Both accumulate in double and visit keys in
// the same order, so their outputs agree bit for bit.
//
// All matrices are row-major float. Weights are stored [out][in].

namespace kolab::kernels {

struct AttentionDims {
  int tokens = 0;
  int heads = 0;
  int head_dim = 0;
  int model_dim() const { return heads * head_dim; }
};

// Optional probability capture: [head][query][key], zero where blocked.
// Pass an empty span to skip.

namespace reference {

void linear(std::span<const float> in, int rows, int in_dim, std::span<const float> weight,
            int out_dim, std::span<float> out);
void rms_norm(std::span<const float> x, int rows, int dim, std::span<const float> gain, float eps,
              std::span<float> out);
void rotary(std::span<float> x, int rows, int heads, int head_dim, int rotary_dims,
            std::span<const int> positions, double base);
void gelu(std::span<float> x);
void attention(std::span<const float> q, std::span<const float> k, std::span<const float> v,
               AttentionDims dims, const AdditiveMask& mask, std::span<float> out,
               std::span<float> probs = {});

}  // namespace reference

namespace parallel {

void linear(std::span<const float> in, int rows, int in_dim, std::span<const float> weight,
            int out_dim, std::span<float> out);
void rms_norm(std::span<const float> x, int rows, int dim, std::span<const float> gain, float eps,
              std::span<float> out);
void rotary(std::span<float> x, int rows, int heads, int head_dim, int rotary_dims,
            std::span<const int> positions, double base);
void gelu(std::span<float> x);
// `frames` holds one frame tag per token (see frame_tag).
void attention(std::span<const float> q, std::span<const float> k, std::span<const float> v,
               AttentionDims dims, std::span<const int> frames, KnockoutType knockout,
               std::span<float> out, std::span<float> probs = {});

}  // namespace parallel

}  // namespace kolab::kernels
