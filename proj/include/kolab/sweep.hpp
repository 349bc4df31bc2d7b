#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kolab/circuit.hpp"
#include "kolab/model.hpp"
#include "kolab/schedule.hpp"

namespace kolab {

enum class Protocol { Global1, Global2, FineGrained, Efficiency, Single };

std::string_view name_of(Protocol p);
Protocol parse_protocol(std::string_view text);

struct SweepSpec {
  Protocol protocol = Protocol::Global1;
  KnockoutType knockout = KnockoutType::LVK;  // FineGrained only
  int window_len = 4;
  int stride = 1;
  std::vector<int> cutoffs;  // Global1; empty means {1, 3, 5, ...} plus depth
  int spatial_window_end = 8;  // Efficiency
  int exit_layer = 18;         // Efficiency
  std::optional<LayerSchedule> schedule;  // Single
};

struct SweepRecord {
  std::string protocol;
  std::string schedule;
  std::string knockout;
  std::optional<int> cutoff_or_window_end;
  double layer_ratio = 0.0;
  std::optional<double> score;
  std::optional<double> performance_ratio;
  std::optional<double> delta;
  double logit_drift = 0.0;
  double flops_ratio = 0.0;  // percent

  bool operator==(const SweepRecord&) const = default;
};

// What a task hands back for one schedule: an optional scalar score and the
// final-position logits of every task instance, in a fixed instance order.
struct TaskResult {
  std::optional<double> score;
  std::vector<std::vector<float>> final_logits;
};

class Task {
 public:
  virtual ~Task() = default;
  virtual const TokenLayout& layout() const = 0;
  virtual int depth() const = 0;
  // Must be safe to call concurrently.
  virtual TaskResult evaluate(const LayerSchedule& schedule) const = 0;
};

// Exhaustive marker placement on a retrieval circuit; score = accuracy.
class CircuitTask : public Task {
 public:
  // every_local = false plants the marker at local index 0 of each frame only.
  explicit CircuitTask(RetrievalCircuit circuit, bool every_local = true);

  const TokenLayout& layout() const override { return circuit_.layout; }
  int depth() const override { return circuit_.model.config.depth; }
  TaskResult evaluate(const LayerSchedule& schedule) const override;

  const RetrievalCircuit& circuit() const { return circuit_; }
  int instance_count() const { return static_cast<int>(instances_.size()); }

 private:
  struct Instance {
    std::vector<int> tokens;
    int answer;
  };
  RetrievalCircuit circuit_;
  std::vector<Instance> instances_;
};

// Random inputs through a seeded model. Accuracy is meaningless on random
// weights, so the score is top-1 agreement with the unmodified model.
class DriftTask : public Task {
 public:
  DriftTask(ToyTransformer model, TokenLayout layout, int num_inputs, std::uint64_t input_seed);
  DriftTask(ToyTransformer model, TokenLayout layout, std::vector<std::vector<int>> inputs);

  const TokenLayout& layout() const override { return layout_; }
  int depth() const override { return model_.config.depth; }
  TaskResult evaluate(const LayerSchedule& schedule) const override;

 private:
  void init();
  std::vector<int> predictions(const LayerSchedule& schedule,
                               std::vector<std::vector<float>>* logits) const;

  ToyTransformer model_;
  TokenLayout layout_;
  std::vector<std::vector<int>> inputs_;
  std::vector<int> baseline_top1_;
};

// Deterministic random token ids in [0, vocab).
std::vector<int> random_tokens(int count, int vocab, std::uint64_t seed);

double layer_ratio(int cutoff, int depth);
// Fraction of layers where text can still read video: no LV-K and video present.
double layer_ratio(const LayerSchedule& schedule);
// 100 * score / baseline. Throws Error(UndefinedRatio) unless baseline > 0.
double performance_ratio(double score, double baseline_score);
// Symmetric KL between the softmax of two logit vectors.
double logit_drift(std::span<const float> base, std::span<const float> knocked_out);
double logit_drift(const ForwardTrace& base, const ForwardTrace& knocked_out);

struct PlannedRun {
  LayerSchedule schedule;
  std::string knockout;
  std::optional<int> cutoff_or_window_end;
};

// Baseline first, then the protocol's schedules in definition order.
std::vector<PlannedRun> plan_sweep(const SweepSpec& spec, int depth);

struct SweepOptions {
  int workers = 0;  // 0: KNOCKOUT_LAB_WORKERS, else the OpenMP default
};

int resolve_workers(int requested);

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, const Task& task,
                                   const SweepOptions& options = {});

}  // namespace kolab
