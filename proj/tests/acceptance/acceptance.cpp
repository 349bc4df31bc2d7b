// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances are fixed here and never tuned at runtime.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kolab/circuit.hpp"
#include "kolab/flops.hpp"
#include "kolab/model.hpp"
#include "kolab/sweep.hpp"

using namespace kolab;

namespace {

constexpr double kExitOnlyTarget = 64.3, kExitOnlyTol = 0.1;
constexpr double kExitWindowTarget = 37.1, kExitWindowTol = 1.0;
constexpr int kExitWindowTextLen = 0;  // video-only convention
constexpr double kOracleRelTol = 1e-5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ModelConfig model_config(int depth, int dim, int heads, std::uint64_t seed) {
  ModelConfig c;
  c.depth = depth;
  c.model_dim = dim;
  c.head_count = heads;
  c.ffn_dim = 2 * dim;
  c.vocab_size = 97;
  c.seed = seed;
  return c;
}

Outcome exit_only() {
  double worst = 0.0;
  std::string values;
  for (int t : {0, 1, 50, 100, 150, 196}) {
    const double pct =
        schedule_flops_ratio(build_layout(32, 196, t), schedule_efficiency(28, 0, 18)).percent();
    worst = std::max(worst, std::abs(pct - kExitOnlyTarget));
    values += fmt(" T=%d:%.3f%%", t, pct);
  }
  return {worst <= kExitOnlyTol, fmt("max |ratio - 64.3| = %.3f pp (tol %.1f);", worst, kExitOnlyTol) + values};
}

Outcome exit_window() {
  const auto layout = build_layout(32, 196, kExitWindowTextLen);
  const double pct = schedule_flops_ratio(layout, schedule_efficiency(28, 8, 18)).percent();
  std::string sensitivity;
  for (int t : {50, 100, 196}) {
    sensitivity += fmt(" T=%d:%.2f%%", t,
                       schedule_flops_ratio(build_layout(32, 196, t), schedule_efficiency(28, 8, 18)).percent());
  }
  return {std::abs(pct - kExitWindowTarget) <= kExitWindowTol,
          fmt("%.2f%% at text_len=%d (target 37.1 +/- %.1f pp); convention: %s; other T:",
              pct, kExitWindowTextLen, kExitWindowTol, kCostConvention) +
              sensitivity};
}

Outcome spatial_factor() {
  const auto l = build_layout(32, 196, 0);
  const double ratio = static_cast<double>(layer_pair_count(l, KnockoutType::VTK, true)) /
                       static_cast<double>(layer_pair_count(l, KnockoutType::None, true));
  return {ratio >= 1.0 / 32.5 && ratio <= 1.0 / 31.5,
          fmt("VT-K/baseline = %.6f = 1/%.3f, want [1/32.5, 1/31.5]", ratio, 1.0 / ratio)};
}

Outcome lvk_oracle() {
  const TokenLayout layouts[] = {build_layout(4, 16, 8), build_layout(8, 32, 16), build_layout(16, 30, 20)};
  const std::uint64_t seeds[] = {1, 2, 3, 4, 5};
  double worst = 0.0;
  int runs = 0;
  for (std::uint64_t seed : seeds) {
    for (const auto& layout : layouts) {
      const int dim = seed % 2 ? 64 : 32;
      const auto model = init_model(model_config(8, dim, 4, seed));
      const auto seq = make_sequence(layout, random_tokens(layout.total_len(), 97, seed * 31));
      const auto full = forward(model, seq, schedule_global2(8, KnockoutType::LVK));
      const auto text = forward(model, text_only(seq), baseline_schedule(8));
      worst = std::max(worst, relative_difference(full.logits, text.logits));
      ++runs;
    }
  }
  return {worst <= kOracleRelTol, fmt("%d runs (5 seeds x 3 layouts, S <= 500, d <= 64, L = 8), max rel diff %.3g (tol %.0e)",
                                      runs, worst, kOracleRelTol)};
}

Outcome early_exit_oracle() {
  double worst = 0.0;
  int runs = 0;
  for (std::uint64_t seed : {7u, 8u}) {
    const auto model = init_model(model_config(6, 48, 4, seed));
    const auto layout = build_layout(6, 12, 10);
    const auto tokens = random_tokens(layout.total_len(), 97, seed);
    for (int e = 1; e <= 6; ++e) {
      LayerSchedule pruned = schedule_global1(6, e);
      const auto masked = forward(model, tokens, layout, pruned);
      pruned.exit_layer = e;
      const auto exited = forward(model, tokens, layout, pruned);
      worst = std::max(worst, relative_difference(exited.logits, masked.logits));
      ++runs;
    }
  }
  return {worst <= kOracleRelTol, fmt("every e in 1..6, %d runs, max rel diff %.3g (tol %.0e)", runs, worst, kOracleRelTol)};
}

Outcome vtk_oracle() {
  double worst = 0.0;
  int compared = 0;
  for (const auto& layout : {build_layout(2, 8, 0), build_layout(3, 5, 0), build_layout(4, 16, 0)}) {
    const auto model = init_model(model_config(4, 32, 4, 17));
    const auto seq = make_sequence(layout, random_tokens(layout.total_len(), 97, 3));
    const auto full = forward(model, seq, schedule_global2(4, KnockoutType::VTK), {.capture_hidden = true});
    const int p = layout.tokens_per_frame();
    for (int f = 0; f < layout.num_frames(); ++f) {
      const auto alone = forward(model, frame_only(seq, f), baseline_schedule(4), {.capture_hidden = true});
      for (int layer = 1; layer <= 4; ++layer) {
        const std::span<const float> rows(full.hidden[layer].values.data() + static_cast<size_t>(f) * p * 32,
                                          static_cast<size_t>(p) * 32);
        worst = std::max(worst, relative_difference(rows, alone.hidden[layer].values));
        ++compared;
      }
    }
  }
  return {worst <= kOracleRelTol, fmt("%d (frame, layer) states up to 4x16, max rel diff %.3g (tol %.0e)", compared, worst, kOracleRelTol)};
}

Outcome mask_brute_force() {
  int layouts = 0, mismatches = 0;
  for (int n = 1; n <= 6; ++n) {
    for (int p : {1, 3, 7, 12}) {
      for (int t : {0, 2, 9}) {
        const auto l = build_layout(n, p, t);
        if (l.total_len() > 200) continue;
        ++layouts;
        for (KnockoutType kt : {KnockoutType::None, KnockoutType::LVK, KnockoutType::VTK, KnockoutType::VSK}) {
          std::uint64_t brute = 0;
          for (int q = 0; q < l.total_len(); ++q)
            for (int k = 0; k < l.total_len(); ++k) brute += allowed({l, kt}, q, k);
          mismatches += brute != layer_pair_count(l, kt, true);
        }
      }
    }
  }
  return {layouts >= 20 && mismatches == 0, fmt("%d layouts x 4 knockout types, %d mismatches", layouts, mismatches)};
}

CircuitTask acceptance_circuit() {
  return CircuitTask(build_retrieval_circuit(build_layout(32, 4, 2), default_markers(4)));
}

Outcome circuit_asymmetry() {
  const CircuitTask task = acceptance_circuit();
  const int depth = task.depth();
  const double base = *task.evaluate(baseline_schedule(depth)).score;
  const double vtk = *task.evaluate(schedule_global2(depth, KnockoutType::VTK)).score;
  const double vsk = *task.evaluate(schedule_global2(depth, KnockoutType::VSK)).score;
  const double lvk = *task.evaluate(schedule_global2(depth, KnockoutType::LVK)).score;
  const bool pass = base == 1.0 && vtk == 1.0 && vsk == 1.0 && lvk == 1.0 / 4.0;
  return {pass, fmt("%d placements: baseline %.4f, VT-K %.4f, VS-K %.4f, LV-K %.4f (want 1, 1, 1, 0.25)",
                    task.instance_count(), base, vtk, vsk, lvk)};
}

Outcome window_locality() {
  const CircuitTask task = acceptance_circuit();
  const int copy = task.circuit().copy_layer;
  const auto records = run_sweep({.protocol = Protocol::FineGrained, .knockout = KnockoutType::LVK}, task);
  int wrong = 0;
  std::string hits;
  for (size_t i = 1; i < records.size(); ++i) {
    const int x = *records[i].cutoff_or_window_end;
    const bool covers = x - 3 <= copy && copy <= x;
    if (records[i].logit_drift > 0.0) hits += fmt(" x=%d", x);
    wrong += (records[i].logit_drift > 0.0) != covers;
  }
  return {wrong == 0, fmt("copy layer %d; drift > 0 at windows ending%s; %d misclassified", copy, hits.c_str(), wrong)};
}

Outcome protocol_counts() {
  ModelConfig cfg = model_config(28, 16, 2, 5);
  const DriftTask task(init_model(cfg), build_layout(2, 4, 2), 2, 11);
  const auto g1 = run_sweep({.protocol = Protocol::Global1}, task);
  const auto g2 = run_sweep({.protocol = Protocol::Global2}, task);
  const auto fg = run_sweep({.protocol = Protocol::FineGrained, .knockout = KnockoutType::VTK}, task);
  bool baselines_ok = true;
  for (const auto* r : {&g1, &g2, &fg}) {
    const auto& b = r->front();
    baselines_ok = baselines_ok && b.performance_ratio == 100.0 && b.logit_drift == 0.0 && b.delta == 0.0;
  }
  const bool pass = g1.size() == 15 && g2.size() == 4 && fg.size() == 26 && baselines_ok;
  return {pass, fmt("global1 %zu (want 15), global2 %zu (want 4), window %zu (want 26); baseline ratio 100 / drift 0: %s",
                    g1.size(), g2.size(), fg.size(), baselines_ok ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1  FLOPs exit only = 64.3% +/- 0.1 pp", exit_only},
      {"AC2  FLOPs exit + window = 37.1% +/- 1.0 pp", exit_window},
      {"AC3  temporal/spatial factor in [1/32.5, 1/31.5]", spatial_factor},
      {"AC4  LV-K equals text-only run", lvk_oracle},
      {"AC5  early exit equals LV-K masking", early_exit_oracle},
      {"AC6  VT-K frames independent", vtk_oracle},
      {"AC7  closed-form pair counts equal brute force", mask_brute_force},
      {"AC8  circuit asymmetry across knockout types", circuit_asymmetry},
      {"AC9  fine-grained LV-K drift local to copy layer", window_locality},
      {"AC10 protocol record counts and baseline record", protocol_counts},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %-52s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    failed += !o.pass;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
