#include "kolab/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kolab/error.hpp"

namespace kolab {

namespace {

// Query/key gain on the copy layer. Normalised flag entries are sqrt(d/2), so
// the marker logit is gain * d/2 / sqrt(d); with d = markers + 4 >= 6 this is
// well above log(sequence length) for any layout that fits in memory.
constexpr float kAttendGain = 30.0f;

}  // namespace

std::vector<int> default_markers(int count) {
  std::vector<int> ids(static_cast<size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) ids[i] = i;
  return ids;
}

RetrievalCircuit build_retrieval_circuit(const TokenLayout& layout, std::vector<int> marker_ids,
                                         const CircuitOptions& options) {
  if (layout.text_len() < 1) throw Error(ErrorKind::Config, "retrieval circuit needs text_len >= 1");
  const int m = static_cast<int>(marker_ids.size());
  if (m < 1) throw Error(ErrorKind::Config, "retrieval circuit needs at least one marker");
  if (options.vocab_size < 3 || m > options.vocab_size - 2) {
    throw Error(ErrorKind::Config, "marker vocab of " + std::to_string(m) +
                                       " does not fit model vocab " +
                                       std::to_string(options.vocab_size) +
                                       " (two ids are reserved)");
  }
  std::set<int> distinct(marker_ids.begin(), marker_ids.end());
  if (static_cast<int>(distinct.size()) != m || *distinct.begin() < 0 ||
      *distinct.rbegin() >= options.vocab_size - 2) {
    throw Error(ErrorKind::Config, "marker ids must be distinct and below vocab_size - 2");
  }
  if (options.copy_layer < 1 || options.copy_layer > options.depth) {
    throw Error(ErrorKind::Config, "copy layer outside [1, depth]");
  }

  // Residual dims: [0, m) option one-hot, then marker flag, query flag,
  // filler flag, and a constant bias dim.
  const int d = m + 4;
  const int marker_dim = m, query_dim = m + 1, filler_dim = m + 2, bias_dim = m + 3;

  ModelConfig cfg;
  cfg.depth = options.depth;
  cfg.model_dim = d;
  cfg.head_count = 1;
  cfg.ffn_dim = 1;
  cfg.vocab_size = options.vocab_size;
  cfg.seed = 0;
  cfg.rotary_dims = 0;

  RetrievalCircuit c{zero_model(cfg), layout, std::move(marker_ids), options.vocab_size - 2,
                     options.vocab_size - 1, options.copy_layer};
  ToyTransformer& model = c.model;
  auto at = [d](std::vector<float>& w, int row, int col) -> float& {
    return w[static_cast<size_t>(row) * d + col];
  };

  // Every embedding has exactly two unit entries, so all tokens share one RMS.
  for (int id = 0; id < cfg.vocab_size; ++id) {
    at(model.embedding, id, filler_dim) = 1.0f;
    at(model.embedding, id, bias_dim) = 1.0f;
  }
  for (int o = 0; o < m; ++o) {
    const int id = c.marker_ids[o];
    at(model.embedding, id, filler_dim) = 0.0f;
    at(model.embedding, id, bias_dim) = 0.0f;
    at(model.embedding, id, o) = 1.0f;
    at(model.embedding, id, marker_dim) = 1.0f;
  }
  at(model.embedding, c.query_id, filler_dim) = 0.0f;
  at(model.embedding, c.query_id, query_dim) = 1.0f;

  LayerWeights& copy = model.layers[options.copy_layer - 1];
  at(copy.wq, 0, query_dim) = kAttendGain;
  at(copy.wk, 0, marker_dim) = 1.0f;
  for (int o = 0; o < m; ++o) {
    at(copy.wv, o, o) = 1.0f;
    at(copy.wo, o, o) = 1.0f;
  }

  for (int o = 0; o < m; ++o) at(model.unembedding, c.marker_ids[o], o) = 1.0f;
  return c;
}

std::vector<int> RetrievalCircuit::prompt(int frame, int local, int option) const {
  std::vector<int> tokens(static_cast<size_t>(layout.total_len()), filler_id);
  for (int t = layout.video_len(); t < layout.total_len(); ++t) tokens[t] = query_id;
  tokens.at(static_cast<size_t>(index_of(layout, VideoToken{frame, local}))) =
      marker_ids.at(static_cast<size_t>(option));
  return tokens;
}

}  // namespace kolab
