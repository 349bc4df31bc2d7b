#include "kolab/sweep.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>

#include "kolab/error.hpp"
#include "kolab/flops.hpp"

namespace kolab {

std::string_view name_of(Protocol p) {
  switch (p) {
    case Protocol::Global1: return "global1";
    case Protocol::Global2: return "global2";
    case Protocol::FineGrained: return "window";
    case Protocol::Efficiency: return "efficiency";
    case Protocol::Single: return "single";
  }
  return "?";
}

Protocol parse_protocol(std::string_view text) {
  std::string key;
  for (char c : text) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "global1") return Protocol::Global1;
  if (key == "global2") return Protocol::Global2;
  if (key == "window" || key == "fine-grained" || key == "finegrained") return Protocol::FineGrained;
  if (key == "efficiency") return Protocol::Efficiency;
  if (key == "single" || key == "run") return Protocol::Single;
  throw Error(ErrorKind::Parse, "unknown protocol '" + std::string(text) + "'");
}

std::vector<int> random_tokens(int count, int vocab, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::vector<int> out(static_cast<size_t>(count));
  for (int& t : out) t = static_cast<int>(engine() % static_cast<std::uint64_t>(vocab));
  return out;
}

// ---------------------------------------------------------------------------

CircuitTask::CircuitTask(RetrievalCircuit circuit, bool every_local) : circuit_(std::move(circuit)) {
  const TokenLayout& l = circuit_.layout;
  const int locals = every_local ? l.tokens_per_frame() : 1;
  const int options = static_cast<int>(circuit_.marker_ids.size());
  for (int f = 0; f < l.num_frames(); ++f) {
    for (int k = 0; k < locals; ++k) {
      for (int o = 0; o < options; ++o) instances_.push_back({circuit_.prompt(f, k, o), o});
    }
  }
}

TaskResult CircuitTask::evaluate(const LayerSchedule& schedule) const {
  TaskResult r;
  int correct = 0;
  for (const auto& inst : instances_) {
    const ForwardTrace trace = forward(circuit_.model, inst.tokens, circuit_.layout, schedule);
    const auto logits = trace.final_logits();
    if (pick_option(logits, circuit_.marker_ids).chosen == inst.answer) ++correct;
    r.final_logits.emplace_back(logits.begin(), logits.end());
  }
  r.score = static_cast<double>(correct) / static_cast<double>(instances_.size());
  return r;
}

DriftTask::DriftTask(ToyTransformer model, TokenLayout layout, int num_inputs,
                     std::uint64_t input_seed)
    : model_(std::move(model)), layout_(layout) {
  for (int i = 0; i < num_inputs; ++i) {
    inputs_.push_back(random_tokens(layout_.total_len(), model_.config.vocab_size,
                                    input_seed + static_cast<std::uint64_t>(i)));
  }
  init();
}

DriftTask::DriftTask(ToyTransformer model, TokenLayout layout, std::vector<std::vector<int>> inputs)
    : model_(std::move(model)), layout_(layout), inputs_(std::move(inputs)) {
  init();
}

void DriftTask::init() {
  if (inputs_.empty()) throw Error(ErrorKind::Config, "drift task needs at least one input");
  if (layout_.text_len() < 1) throw Error(ErrorKind::Config, "drift task needs text_len >= 1");
  baseline_top1_ = predictions(baseline_schedule(model_.config.depth), nullptr);
}

std::vector<int> DriftTask::predictions(const LayerSchedule& schedule,
                                        std::vector<std::vector<float>>* logits) const {
  std::vector<int> top1;
  for (const auto& tokens : inputs_) {
    const ForwardTrace trace = forward(model_, tokens, layout_, schedule);
    const auto last = trace.final_logits();
    top1.push_back(static_cast<int>(std::max_element(last.begin(), last.end()) - last.begin()));
    if (logits) logits->emplace_back(last.begin(), last.end());
  }
  return top1;
}

TaskResult DriftTask::evaluate(const LayerSchedule& schedule) const {
  TaskResult r;
  const auto top1 = predictions(schedule, &r.final_logits);
  int agree = 0;
  for (size_t i = 0; i < top1.size(); ++i) agree += top1[i] == baseline_top1_[i];
  r.score = static_cast<double>(agree) / static_cast<double>(top1.size());
  return r;
}

// ---------------------------------------------------------------------------

double layer_ratio(int cutoff, int depth) {
  if (depth < 1 || cutoff < 1 || cutoff > depth) {
    throw Error(ErrorKind::InvalidSchedule, "cutoff outside [1, depth]");
  }
  return static_cast<double>(cutoff) / static_cast<double>(depth);
}

double layer_ratio(const LayerSchedule& schedule) {
  int open = 0;
  for (int layer = 1; layer <= schedule.depth(); ++layer) {
    if (schedule.video_present(layer) && schedule.at(layer) != KnockoutType::LVK) ++open;
  }
  return static_cast<double>(open) / static_cast<double>(schedule.depth());
}

double performance_ratio(double score, double baseline_score) {
  if (!(baseline_score > 0.0)) {
    throw Error(ErrorKind::UndefinedRatio, "performance ratio needs a positive baseline score");
  }
  // score / baseline first so that score == baseline gives exactly 100.
  return 100.0 * (score / baseline_score);
}

double logit_drift(std::span<const float> base, std::span<const float> knocked_out) {
  if (base.size() != knocked_out.size() || base.empty()) {
    throw Error(ErrorKind::Shape, "logit drift needs two equal, non-empty logit vectors");
  }
  auto log_softmax = [](std::span<const float> z) {
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (float v : z) sum += std::exp(v - mx);
    const double lse = mx + std::log(sum);
    std::vector<double> out(z.size());
    for (size_t i = 0; i < z.size(); ++i) out[i] = z[i] - lse;
    return out;
  };
  const auto lp = log_softmax(base), lq = log_softmax(knocked_out);
  double drift = 0.0;
  for (size_t i = 0; i < lp.size(); ++i) drift += (std::exp(lp[i]) - std::exp(lq[i])) * (lp[i] - lq[i]);
  return std::max(drift, 0.0);
}

double logit_drift(const ForwardTrace& base, const ForwardTrace& knocked_out) {
  return logit_drift(base.final_logits(), knocked_out.final_logits());
}

// ---------------------------------------------------------------------------

std::vector<PlannedRun> plan_sweep(const SweepSpec& spec, int depth) {
  std::vector<PlannedRun> plan;
  const std::string none(name_of(KnockoutType::None));
  switch (spec.protocol) {
    case Protocol::Global1: {
      std::vector<int> cutoffs = spec.cutoffs;
      if (cutoffs.empty()) {
        for (int i = 1; i <= depth; i += 2) cutoffs.push_back(i);
      }
      plan.push_back({schedule_global1(depth, depth), none, depth});
      for (int c : cutoffs) {
        if (c == depth) continue;
        plan.push_back({schedule_global1(depth, c), std::string(name_of(KnockoutType::LVK)), c});
      }
      break;
    }
    case Protocol::Global2:
      plan.push_back({baseline_schedule(depth), none, std::nullopt});
      for (KnockoutType kt : kKnockouts) {
        plan.push_back({schedule_global2(depth, kt), std::string(name_of(kt)), std::nullopt});
      }
      break;
    case Protocol::FineGrained:
      if (spec.knockout == KnockoutType::None) {
        throw Error(ErrorKind::InvalidSchedule, "fine-grained sweep needs a knockout type");
      }
      if (spec.stride < 1) throw Error(ErrorKind::InvalidSchedule, "stride must be >= 1");
      if (spec.window_len < 1 || spec.window_len > depth) {
        throw Error(ErrorKind::InvalidSchedule, "window length outside [1, depth]");
      }
      plan.push_back({baseline_schedule(depth), none, std::nullopt});
      for (int x = spec.window_len; x <= depth; x += spec.stride) {
        plan.push_back({schedule_window(depth, spec.knockout, x, spec.window_len),
                        std::string(name_of(spec.knockout)), x});
      }
      break;
    case Protocol::Efficiency:
      plan.push_back({baseline_schedule(depth), none, std::nullopt});
      plan.push_back({schedule_efficiency(depth, 0, spec.exit_layer), "exit", spec.exit_layer});
      if (spec.spatial_window_end > 0) {
        plan.push_back({schedule_efficiency(depth, spec.spatial_window_end, spec.exit_layer),
                        "VT-K+exit", spec.exit_layer});
      }
      break;
    case Protocol::Single: {
      if (!spec.schedule) throw Error(ErrorKind::InvalidSchedule, "single run needs a schedule");
      validate(*spec.schedule);
      if (spec.schedule->depth() != depth) {
        throw Error(ErrorKind::InvalidSchedule, "schedule depth does not match model depth");
      }
      plan.push_back({baseline_schedule(depth), none, std::nullopt});
      if (!spec.schedule->is_baseline()) {
        std::string label;
        for (KnockoutType kt : spec.schedule->per_layer) {
          if (kt != KnockoutType::None && label.find(name_of(kt)) == std::string::npos) {
            if (!label.empty()) label += "+";
            label += name_of(kt);
          }
        }
        if (spec.schedule->exit_layer) label += label.empty() ? "exit" : "+exit";
        plan.push_back({*spec.schedule, label, spec.schedule->exit_layer});
      }
      break;
    }
  }
  return plan;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("KNOCKOUT_LAB_WORKERS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  return std::max(1, omp_get_max_threads());
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, const Task& task,
                                   const SweepOptions& options) {
  const auto plan = plan_sweep(spec, task.depth());
  const std::string protocol(name_of(spec.protocol));

  auto failure = [](const PlannedRun& run, const std::string& what) {
    return Error(ErrorKind::Task, "schedule '" + render_schedule(run.schedule) + "': " + what);
  };

  TaskResult baseline;
  try {
    baseline = task.evaluate(plan.front().schedule);
  } catch (const std::exception& e) {
    throw failure(plan.front(), e.what());
  }

  std::vector<TaskResult> results(plan.size());
  std::vector<std::exception_ptr> errors(plan.size());
  results[0] = baseline;
  const int workers = resolve_workers(options.workers);
  const int count = static_cast<int>(plan.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1)
  for (int i = 1; i < count; ++i) {
    try {
      results[i] = task.evaluate(plan[i].schedule);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (int i = 1; i < count; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw failure(plan[i], e.what());
    }
  }

  std::vector<SweepRecord> records;
  for (int i = 0; i < count; ++i) {
    const PlannedRun& run = plan[i];
    const TaskResult& r = results[i];
    SweepRecord rec;
    rec.protocol = protocol;
    rec.schedule = render_schedule(run.schedule);
    rec.knockout = run.knockout;
    rec.cutoff_or_window_end = run.cutoff_or_window_end;
    rec.layer_ratio = layer_ratio(run.schedule);
    rec.flops_ratio = schedule_flops_ratio(task.layout(), run.schedule).percent();
    if (r.score && baseline.score) {
      rec.score = r.score;
      rec.delta = *r.score - *baseline.score;
      if (*baseline.score > 0.0) rec.performance_ratio = performance_ratio(*r.score, *baseline.score);
    }
    if (r.final_logits.size() != baseline.final_logits.size()) {
      throw failure(run, "task returned a different number of instances than the baseline");
    }
    double drift = 0.0;
    for (size_t j = 0; j < r.final_logits.size(); ++j) {
      drift += logit_drift(baseline.final_logits[j], r.final_logits[j]);
    }
    if (!r.final_logits.empty()) drift /= static_cast<double>(r.final_logits.size());
    rec.logit_drift = drift;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace kolab
