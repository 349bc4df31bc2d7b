#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kolab/kernels.hpp"

namespace kolab::kernels::reference {

void linear(std::span<const float> in, int rows, int in_dim, std::span<const float> weight,
            int out_dim, std::span<float> out) {
  for (int r = 0; r < rows; ++r) {
    const float* x = in.data() + static_cast<size_t>(r) * in_dim;
    for (int o = 0; o < out_dim; ++o) {
      const float* w = weight.data() + static_cast<size_t>(o) * in_dim;
      double acc = 0.0;
      for (int i = 0; i < in_dim; ++i) acc += static_cast<double>(w[i]) * x[i];
      out[static_cast<size_t>(r) * out_dim + o] = static_cast<float>(acc);
    }
  }
}

void rms_norm(std::span<const float> x, int rows, int dim, std::span<const float> gain, float eps,
              std::span<float> out) {
  for (int r = 0; r < rows; ++r) {
    const float* row = x.data() + static_cast<size_t>(r) * dim;
    double ss = 0.0;
    for (int i = 0; i < dim; ++i) ss += static_cast<double>(row[i]) * row[i];
    const double inv = 1.0 / std::sqrt(ss / dim + eps);
    for (int i = 0; i < dim; ++i) {
      out[static_cast<size_t>(r) * dim + i] = static_cast<float>(row[i] * inv * gain[i]);
    }
  }
}

void rotary(std::span<float> x, int rows, int heads, int head_dim, int rotary_dims,
            std::span<const int> positions, double base) {
  const int pairs = std::min(rotary_dims, head_dim) / 2;
  for (int r = 0; r < rows; ++r) {
    for (int h = 0; h < heads; ++h) {
      float* v = x.data() + static_cast<size_t>(r) * heads * head_dim + static_cast<size_t>(h) * head_dim;
      for (int i = 0; i < pairs; ++i) {
        const double freq = std::pow(base, -2.0 * i / (2.0 * pairs));
        const double angle = positions[r] * freq;
        const double c = std::cos(angle), s = std::sin(angle);
        const double a = v[2 * i], b = v[2 * i + 1];
        v[2 * i] = static_cast<float>(a * c - b * s);
        v[2 * i + 1] = static_cast<float>(a * s + b * c);
      }
    }
  }
}

void gelu(std::span<float> x) {
  constexpr double kSqrt2OverPi = 0.7978845608028654;
  for (float& value : x) {
    const double u = value;
    value = static_cast<float>(0.5 * u * (1.0 + std::tanh(kSqrt2OverPi * (u + 0.044715 * u * u * u))));
  }
}

void attention(std::span<const float> q, std::span<const float> k, std::span<const float> v,
               AttentionDims dims, const AdditiveMask& mask, std::span<float> out,
               std::span<float> probs) {
  const int n = dims.tokens, dh = dims.head_dim, d = dims.model_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<double> scores(static_cast<size_t>(n));
  std::vector<double> acc(static_cast<size_t>(dh));
  for (int h = 0; h < dims.heads; ++h) {
    for (int i = 0; i < n; ++i) {
      const float* qi = q.data() + static_cast<size_t>(i) * d + static_cast<size_t>(h) * dh;
      double mx = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        const float* kj = k.data() + static_cast<size_t>(j) * d + static_cast<size_t>(h) * dh;
        double dot = 0.0;
        for (int t = 0; t < dh; ++t) dot += static_cast<double>(qi[t]) * kj[t];
        scores[j] = dot * scale + static_cast<double>(mask.at(i, j));
        mx = std::max(mx, scores[j]);
      }
      std::fill(acc.begin(), acc.end(), 0.0);
      double sum = 0.0;
      for (int j = 0; j < n; ++j) {
        const double w = std::exp(scores[j] - mx);
        scores[j] = w;
        sum += w;
        const float* vj = v.data() + static_cast<size_t>(j) * d + static_cast<size_t>(h) * dh;
        for (int t = 0; t < dh; ++t) acc[t] += w * vj[t];
      }
      float* oi = out.data() + static_cast<size_t>(i) * d + static_cast<size_t>(h) * dh;
      for (int t = 0; t < dh; ++t) oi[t] = static_cast<float>(acc[t] / sum);
      if (!probs.empty()) {
        float* row = probs.data() + (static_cast<size_t>(h) * n + i) * n;
        for (int j = 0; j < n; ++j) row[j] = static_cast<float>(scores[j] / sum);
      }
    }
  }
}

}  // namespace kolab::kernels::reference
