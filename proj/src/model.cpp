#include "kolab/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "kolab/error.hpp"
#include "kolab/kernels.hpp"

namespace kolab {

namespace {

constexpr float kNormEps = 1e-6f;

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorKind::Config, message);
}

// Uniform in [-bound, bound). Built from raw mt19937_64 output rather than
// std::uniform_real_distribution, whose algorithm differs between standard
// libraries.
class WeightSource {
 public:
  explicit WeightSource(std::uint64_t seed) : engine_(seed) {}

  void fill(std::vector<float>& out, size_t count, double bound) {
    out.resize(count);
    for (float& w : out) {
      const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      w = static_cast<float>((2.0 * unit - 1.0) * bound);
    }
  }

 private:
  std::mt19937_64 engine_;
};

void fnv_mix(std::uint64_t& h, std::span<const float> values) {
  for (float f : values) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    for (int b = 0; b < 4; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  }
}

}  // namespace

int ModelConfig::effective_rotary_dims() const {
  const int full = head_dim() - head_dim() % 2;
  if (!rotary_dims) return full;
  return std::min(*rotary_dims - *rotary_dims % 2, full);
}

void validate(const ModelConfig& c) {
  if (c.depth < 1) config_error("depth must be >= 1");
  if (c.model_dim < 1 || c.head_count < 1 || c.ffn_dim < 1 || c.vocab_size < 1) {
    config_error("model dims must all be >= 1");
  }
  if (c.model_dim % c.head_count != 0) {
    config_error("model_dim " + std::to_string(c.model_dim) + " not divisible by head_count " +
                 std::to_string(c.head_count));
  }
  if (c.rotary_dims && *c.rotary_dims < 0) config_error("rotary_dims must be >= 0");
  if (!(c.rope_base > 1.0)) config_error("rope_base must be > 1");
}

std::uint64_t ToyTransformer::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  fnv_mix(h, embedding);
  for (const auto& l : layers) {
    for (const auto* w : {&l.attn_norm, &l.wq, &l.wk, &l.wv, &l.wo, &l.ffn_norm, &l.w_in, &l.w_out}) {
      fnv_mix(h, *w);
    }
  }
  fnv_mix(h, final_norm);
  fnv_mix(h, unembedding);
  return h;
}

ToyTransformer zero_model(const ModelConfig& config) {
  validate(config);
  const size_t d = config.model_dim, f = config.ffn_dim, v = config.vocab_size;
  ToyTransformer m;
  m.config = config;
  m.embedding.assign(v * d, 0.0f);
  m.layers.resize(static_cast<size_t>(config.depth));
  for (auto& l : m.layers) {
    l.attn_norm.assign(d, 1.0f);
    l.ffn_norm.assign(d, 1.0f);
    l.wq.assign(d * d, 0.0f);
    l.wk.assign(d * d, 0.0f);
    l.wv.assign(d * d, 0.0f);
    l.wo.assign(d * d, 0.0f);
    l.w_in.assign(f * d, 0.0f);
    l.w_out.assign(d * f, 0.0f);
  }
  m.final_norm.assign(d, 1.0f);
  m.unembedding.assign(v * d, 0.0f);
  return m;
}

ToyTransformer init_model(const ModelConfig& config) {
  ToyTransformer m = zero_model(config);
  const size_t d = config.model_dim, f = config.ffn_dim, v = config.vocab_size;
  WeightSource src(config.seed);
  const double bound_d = 1.0 / std::sqrt(static_cast<double>(d));
  const double bound_f = 1.0 / std::sqrt(static_cast<double>(f));
  src.fill(m.embedding, v * d, 1.0);
  for (auto& l : m.layers) {
    src.fill(l.wq, d * d, bound_d);
    src.fill(l.wk, d * d, bound_d);
    src.fill(l.wv, d * d, bound_d);
    src.fill(l.wo, d * d, bound_d);
    src.fill(l.w_in, f * d, bound_d);
    src.fill(l.w_out, d * f, bound_f);
  }
  src.fill(m.unembedding, v * d, bound_d);
  return m;
}

Sequence make_sequence(const TokenLayout& layout, std::span<const int> tokens) {
  if (static_cast<int>(tokens.size()) != layout.total_len()) {
    throw Error(ErrorKind::Shape, "token count " + std::to_string(tokens.size()) +
                                      " does not match layout length " +
                                      std::to_string(layout.total_len()));
  }
  Sequence seq;
  seq.reserve(tokens.size());
  for (int i = 0; i < layout.total_len(); ++i) seq.push_back({tokens[i], i, role_of(layout, i)});
  return seq;
}

Sequence text_only(const Sequence& seq) {
  Sequence out;
  std::copy_if(seq.begin(), seq.end(), std::back_inserter(out),
               [](const TokenSlot& s) { return is_text(s.role); });
  return out;
}

Sequence frame_only(const Sequence& seq, int frame) {
  Sequence out;
  std::copy_if(seq.begin(), seq.end(), std::back_inserter(out),
               [frame](const TokenSlot& s) { return frame_tag(s.role) == frame; });
  return out;
}

std::span<const float> ForwardTrace::final_logits() const {
  if (text_positions.empty()) throw Error(ErrorKind::Shape, "trace has no text positions");
  return logits_at(static_cast<int>(text_positions.size()) - 1);
}

std::span<const float> ForwardTrace::logits_at(int text_row) const {
  return std::span<const float>(logits).subspan(static_cast<size_t>(text_row) * vocab_size,
                                                static_cast<size_t>(vocab_size));
}

ForwardTrace forward(const ToyTransformer& model, const Sequence& seq, const LayerSchedule& schedule,
                     const ForwardOptions& options) {
  const ModelConfig& cfg = model.config;
  validate(schedule);
  if (schedule.depth() != cfg.depth) {
    throw Error(ErrorKind::Shape, "schedule depth " + std::to_string(schedule.depth()) +
                                      " does not match model depth " + std::to_string(cfg.depth));
  }
  if (seq.empty()) throw Error(ErrorKind::Shape, "empty input sequence");
  for (const auto& slot : seq) {
    if (slot.id < 0 || slot.id >= cfg.vocab_size) {
      throw Error(ErrorKind::Shape, "token id " + std::to_string(slot.id) + " outside vocab");
    }
  }

  const bool ref = options.backend == Backend::Reference;
  const int d = cfg.model_dim, f = cfg.ffn_dim;
  const kernels::AttentionDims base_dims{0, cfg.head_count, cfg.head_dim()};
  const int rot = cfg.effective_rotary_dims();

  std::vector<int> positions, frames, ids;
  for (const auto& slot : seq) {
    positions.push_back(slot.position);
    frames.push_back(frame_tag(slot.role));
    ids.push_back(slot.id);
  }

  int n = static_cast<int>(seq.size());
  std::vector<float> x(static_cast<size_t>(n) * d);
  for (int i = 0; i < n; ++i) {
    std::copy_n(model.embedding.begin() + static_cast<ptrdiff_t>(ids[i]) * d, d,
                x.begin() + static_cast<ptrdiff_t>(i) * d);
  }

  ForwardTrace trace;
  trace.vocab_size = cfg.vocab_size;
  if (options.capture_hidden) trace.hidden.push_back({positions, x});

  std::vector<float> normed, q, k, v, att, proj, mid;
  for (int layer = 1; layer <= cfg.depth; ++layer) {
    const LayerWeights& w = model.layers[layer - 1];
    const KnockoutType kt = schedule.at(layer);
    const size_t nd = static_cast<size_t>(n) * d;
    normed.resize(nd);
    q.resize(nd);
    k.resize(nd);
    v.resize(nd);
    att.resize(nd);
    proj.resize(nd);

    auto dims = base_dims;
    dims.tokens = n;
    std::vector<float> probs;
    if (options.capture_attention) probs.resize(static_cast<size_t>(cfg.head_count) * n * n);

    if (ref) {
      namespace kr = kernels::reference;
      kr::rms_norm(x, n, d, w.attn_norm, kNormEps, normed);
      kr::linear(normed, n, d, w.wq, d, q);
      kr::linear(normed, n, d, w.wk, d, k);
      kr::linear(normed, n, d, w.wv, d, v);
      kr::rotary(q, n, cfg.head_count, cfg.head_dim(), rot, positions, cfg.rope_base);
      kr::rotary(k, n, cfg.head_count, cfg.head_dim(), rot, positions, cfg.rope_base);
      kr::attention(q, k, v, dims, materialize_mask(frames, kt), att, probs);
      kr::linear(att, n, d, w.wo, d, proj);
    } else {
      namespace kp = kernels::parallel;
      kp::rms_norm(x, n, d, w.attn_norm, kNormEps, normed);
      kp::linear(normed, n, d, w.wq, d, q);
      kp::linear(normed, n, d, w.wk, d, k);
      kp::linear(normed, n, d, w.wv, d, v);
      kp::rotary(q, n, cfg.head_count, cfg.head_dim(), rot, positions, cfg.rope_base);
      kp::rotary(k, n, cfg.head_count, cfg.head_dim(), rot, positions, cfg.rope_base);
      kp::attention(q, k, v, dims, frames, kt, att, probs);
      kp::linear(att, n, d, w.wo, d, proj);
    }
    for (size_t i = 0; i < nd; ++i) x[i] += proj[i];

    mid.resize(static_cast<size_t>(n) * f);
    if (ref) {
      namespace kr = kernels::reference;
      kr::rms_norm(x, n, d, w.ffn_norm, kNormEps, normed);
      kr::linear(normed, n, d, w.w_in, f, mid);
      kr::gelu(mid);
      kr::linear(mid, n, f, w.w_out, d, proj);
    } else {
      namespace kp = kernels::parallel;
      kp::rms_norm(x, n, d, w.ffn_norm, kNormEps, normed);
      kp::linear(normed, n, d, w.w_in, f, mid);
      kp::gelu(mid);
      kp::linear(mid, n, f, w.w_out, d, proj);
    }
    for (size_t i = 0; i < nd; ++i) x[i] += proj[i];

    if (options.capture_attention) trace.attention.push_back({positions, std::move(probs)});
    if (options.capture_hidden) trace.hidden.push_back({positions, x});

    if (schedule.exit_layer && layer == *schedule.exit_layer) {
      // Video tokens leave; survivors keep their original position ids.
      int kept = 0;
      for (int i = 0; i < n; ++i) {
        if (frames[i] >= 0) continue;
        if (kept != i) {
          std::copy_n(x.begin() + static_cast<ptrdiff_t>(i) * d, d,
                      x.begin() + static_cast<ptrdiff_t>(kept) * d);
          positions[kept] = positions[i];
          frames[kept] = frames[i];
        }
        ++kept;
      }
      n = kept;
      x.resize(static_cast<size_t>(n) * d);
      positions.resize(static_cast<size_t>(n));
      frames.resize(static_cast<size_t>(n));
      if (n == 0) break;
    }
  }

  std::vector<float> text_rows;
  for (int i = 0; i < n; ++i) {
    if (frames[i] >= 0) continue;
    trace.text_positions.push_back(positions[i]);
    text_rows.insert(text_rows.end(), x.begin() + static_cast<ptrdiff_t>(i) * d,
                     x.begin() + static_cast<ptrdiff_t>(i + 1) * d);
  }
  const int t = static_cast<int>(trace.text_positions.size());
  normed.resize(text_rows.size());
  trace.logits.resize(static_cast<size_t>(t) * cfg.vocab_size);
  if (ref) {
    kernels::reference::rms_norm(text_rows, t, d, model.final_norm, kNormEps, normed);
    kernels::reference::linear(normed, t, d, model.unembedding, cfg.vocab_size, trace.logits);
  } else {
    kernels::parallel::rms_norm(text_rows, t, d, model.final_norm, kNormEps, normed);
    kernels::parallel::linear(normed, t, d, model.unembedding, cfg.vocab_size, trace.logits);
  }
  return trace;
}

ForwardTrace forward(const ToyTransformer& model, std::span<const int> tokens,
                     const TokenLayout& layout, const LayerSchedule& schedule,
                     const ForwardOptions& options) {
  return forward(model, make_sequence(layout, tokens), schedule, options);
}

OptionScores pick_option(std::span<const float> final_logits, std::span<const int> options) {
  if (options.size() < 2) throw Error(ErrorKind::Usage, "need at least two answer options");
  OptionScores out;
  for (int id : options) {
    if (id < 0 || static_cast<size_t>(id) >= final_logits.size()) {
      throw Error(ErrorKind::Usage, "option id " + std::to_string(id) + " outside vocab");
    }
    out.scores.push_back(final_logits[id]);
  }
  out.chosen = 0;
  for (size_t i = 1; i < out.scores.size(); ++i) {
    if (out.scores[i] > out.scores[out.chosen]) out.chosen = static_cast<int>(i);
  }
  return out;
}

OptionScores score_options(const ToyTransformer& model, std::span<const int> tokens,
                           const TokenLayout& layout, const LayerSchedule& schedule,
                           std::span<const int> options) {
  if (options.size() < 2) throw Error(ErrorKind::Usage, "need at least two answer options");
  const ForwardTrace trace = forward(model, tokens, layout, schedule);
  return pick_option(trace.final_logits(), options);
}

double relative_difference(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double diff = 0.0, scale = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(static_cast<double>(a[i]) - b[i]));
    scale = std::max(scale, std::abs(static_cast<double>(b[i])));
  }
  if (diff == 0.0) return 0.0;
  return diff / std::max(scale, 1e-30);
}

}  // namespace kolab
