#pragma once

#include <vector>

#include "kolab/model.hpp"

namespace kolab {

struct CircuitOptions {
  int depth = 8;
  int copy_layer = 5;  // 1-based; the only layer with a non-zero attention output
  int vocab_size = 16;
};

// A hand-weighted single-head model that answers "which marker is in the
// video?". Every video token is filler except one marker; every text token is
// the same query token. On the copy layer the text queries attend almost
// exclusively to the marker and write its one-hot identity into the residual
// stream; all other attention and FFN outputs are exactly zero. The answer
// therefore flows only along text->video edges of the copy layer.
struct RetrievalCircuit {
  ToyTransformer model;
  TokenLayout layout;
  std::vector<int> marker_ids;  // answer options, in option order
  int filler_id = 0;
  int query_id = 0;
  int copy_layer = 0;

  // Prompt with marker `option` planted at Video(frame, local).
  std::vector<int> prompt(int frame, int local, int option) const;
};

// Throws Error(Config) if the layout has no text, the marker ids are not
// distinct ids below vocab_size - 2, or copy_layer is outside [1, depth].
RetrievalCircuit build_retrieval_circuit(const TokenLayout& layout, std::vector<int> marker_ids,
                                         const CircuitOptions& options = {});

// Marker ids 0..count-1.
std::vector<int> default_markers(int count);

}  // namespace kolab
