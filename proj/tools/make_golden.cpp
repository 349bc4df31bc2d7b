// Regenerates the golden logit trace used by test_model. Run once after a
// verified build; the file is checked in under tests/data.
#include <iostream>

#include "kolab/golden.hpp"
#include "kolab/sweep.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_golden OUT_PATH\n";
    return 2;
  }
  using namespace kolab;
  ModelConfig cfg;
  cfg.depth = 4;
  cfg.model_dim = 32;
  cfg.head_count = 4;
  cfg.ffn_dim = 64;
  cfg.vocab_size = 128;
  cfg.seed = 7;
  const TokenLayout layout = build_layout(3, 4, 3);
  const auto tokens = random_tokens(layout.total_len(), cfg.vocab_size, 2024);
  const LayerSchedule schedule = baseline_schedule(cfg.depth);
  const ForwardTrace trace =
      forward(init_model(cfg), tokens, layout, schedule, {Backend::Reference});
  try {
    write_golden(make_golden(cfg, layout, tokens, schedule, trace), argv[1]);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
