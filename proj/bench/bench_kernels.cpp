// Serial reference kernels vs. the OpenMP kernels, plus whole forward passes.
#include <benchmark/benchmark.h>

#include <vector>

#include "kolab/kernels.hpp"
#include "kolab/model.hpp"
#include "kolab/sweep.hpp"

namespace {

using namespace kolab;

std::vector<float> random_matrix(size_t n, std::uint64_t seed) {
  const auto ids = random_tokens(static_cast<int>(n), 2001, seed);
  std::vector<float> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = (ids[i] - 1000) / 1000.0f;
  return out;
}

struct AttentionInputs {
  TokenLayout layout;
  kernels::AttentionDims dims;
  std::vector<float> q, k, v, out;
  std::vector<int> frames;

  explicit AttentionInputs(int frames_count)
      : layout(build_layout(frames_count, 16, 8)), dims{layout.total_len(), 4, 16} {
    const size_t n = static_cast<size_t>(dims.tokens) * dims.model_dim();
    q = random_matrix(n, 1);
    k = random_matrix(n, 2);
    v = random_matrix(n, 3);
    out.resize(n);
    frames = frame_tags(layout);
  }
};

void BM_AttentionReference(benchmark::State& state) {
  AttentionInputs in(static_cast<int>(state.range(0)));
  const auto kt = static_cast<KnockoutType>(state.range(1));
  const AdditiveMask mask = materialize_mask(in.frames, kt);
  for (auto _ : state) {
    kernels::reference::attention(in.q, in.k, in.v, in.dims, mask, in.out);
    benchmark::ClobberMemory();
  }
  state.SetLabel(std::string(name_of(kt)));
}

void BM_AttentionParallel(benchmark::State& state) {
  AttentionInputs in(static_cast<int>(state.range(0)));
  const auto kt = static_cast<KnockoutType>(state.range(1));
  for (auto _ : state) {
    kernels::parallel::attention(in.q, in.k, in.v, in.dims, in.frames, kt, in.out);
    benchmark::ClobberMemory();
  }
  state.SetLabel(std::string(name_of(kt)));
}

void BM_LinearReference(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0)), dim = 64;
  const auto in = random_matrix(static_cast<size_t>(rows) * dim, 4);
  const auto w = random_matrix(static_cast<size_t>(dim) * dim, 5);
  std::vector<float> out(static_cast<size_t>(rows) * dim);
  for (auto _ : state) {
    kernels::reference::linear(in, rows, dim, w, dim, out);
    benchmark::ClobberMemory();
  }
}

void BM_LinearParallel(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0)), dim = 64;
  const auto in = random_matrix(static_cast<size_t>(rows) * dim, 4);
  const auto w = random_matrix(static_cast<size_t>(dim) * dim, 5);
  std::vector<float> out(static_cast<size_t>(rows) * dim);
  for (auto _ : state) {
    kernels::parallel::linear(in, rows, dim, w, dim, out);
    benchmark::ClobberMemory();
  }
}

void BM_Forward(benchmark::State& state) {
  ModelConfig cfg;
  cfg.depth = 6;
  cfg.model_dim = 64;
  cfg.head_count = 4;
  cfg.ffn_dim = 128;
  cfg.seed = 3;
  const auto model = init_model(cfg);
  const auto layout = build_layout(static_cast<int>(state.range(0)), 16, 8);
  const auto tokens = random_tokens(layout.total_len(), cfg.vocab_size, 9);
  const auto schedule = schedule_efficiency(cfg.depth, 2, 4);
  const Backend backend = state.range(1) ? Backend::Parallel : Backend::Reference;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(model, tokens, layout, schedule, {backend}));
  }
  state.SetLabel(backend == Backend::Parallel ? "parallel" : "reference");
}

}  // namespace

BENCHMARK(BM_AttentionReference)->ArgsProduct({{8, 32}, {0, 2}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AttentionParallel)->ArgsProduct({{8, 32}, {0, 2}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinearReference)->Arg(512)->Arg(4096);
BENCHMARK(BM_LinearParallel)->Arg(512)->Arg(4096);
BENCHMARK(BM_Forward)->ArgsProduct({{8, 32}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
