#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kolab/error.hpp"
#include "kolab/flops.hpp"
#include "kolab/sweep.hpp"

using namespace kolab;

namespace {

CircuitTask small_circuit_task(int depth = 8, int copy_layer = 5) {
  CircuitOptions opts;
  opts.depth = depth;
  opts.copy_layer = copy_layer;
  return CircuitTask(build_retrieval_circuit(build_layout(8, 2, 2), default_markers(4), opts));
}

// Fails on any schedule that knocks out layer 2.
class FlakyTask : public Task {
 public:
  FlakyTask() : layout_(build_layout(2, 2, 1)) {}
  const TokenLayout& layout() const override { return layout_; }
  int depth() const override { return 4; }
  TaskResult evaluate(const LayerSchedule& s) const override {
    if (s.at(2) != KnockoutType::None) throw std::runtime_error("boom");
    return {1.0, {{0.0f, 1.0f}}};
  }

 private:
  TokenLayout layout_;
};

}  // namespace

TEST_CASE("layer_ratio") {
  CHECK(layer_ratio(28, 28) == 1.0);
  CHECK(layer_ratio(17, 28) == doctest::Approx(0.607).epsilon(1e-3));
  CHECK(layer_ratio(14, 28) == 0.5);
  CHECK(layer_ratio(schedule_global1(28, 17)) == layer_ratio(17, 28));
  CHECK(layer_ratio(schedule_efficiency(28, 8, 18)) == doctest::Approx(18.0 / 28.0));
  CHECK_THROWS_AS(layer_ratio(0, 28), Error);
}

TEST_CASE("performance_ratio") {
  CHECK(performance_ratio(0.62, 0.62) == 100.0);
  CHECK(performance_ratio(0.25, 1.0) == 25.0);
  CHECK(performance_ratio(0.0, 0.5) == 0.0);
  try {
    performance_ratio(0.5, 0.0);
    FAIL("expected undefined ratio");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UndefinedRatio);
  }
}

TEST_CASE("logit_drift") {
  const std::vector<float> a = {1.0f, 2.0f, 3.0f}, b = {3.0f, 1.0f, 0.0f};
  CHECK(logit_drift(a, a) == 0.0);
  CHECK(logit_drift(a, b) > 0.0);
  CHECK(logit_drift(a, b) == logit_drift(b, a));
  const std::vector<float> shifted = {11.0f, 12.0f, 13.0f};
  CHECK(logit_drift(a, shifted) < 1e-12);
  CHECK_THROWS_AS(logit_drift(a, std::vector<float>{1.0f}), Error);
}

TEST_CASE("protocol record counts") {
  CHECK(plan_sweep({.protocol = Protocol::Global1}, 28).size() == 15);
  CHECK(plan_sweep({.protocol = Protocol::Global1}, 7).size() == 4);  // {7, 1, 3, 5}
  CHECK(plan_sweep({.protocol = Protocol::Global2}, 28).size() == 4);
  CHECK(plan_sweep({.protocol = Protocol::FineGrained}, 28).size() == 26);
  CHECK(plan_sweep({.protocol = Protocol::FineGrained, .stride = 4}, 28).size() == 8);
  CHECK(plan_sweep({.protocol = Protocol::Efficiency}, 28).size() == 3);

  const auto g1 = plan_sweep({.protocol = Protocol::Global1}, 28);
  CHECK(g1.front().schedule.is_baseline());
  CHECK(g1.front().cutoff_or_window_end == 28);
  CHECK(g1[1].cutoff_or_window_end == 1);
  CHECK(g1.back().cutoff_or_window_end == 27);

  CHECK_THROWS_AS(plan_sweep({.protocol = Protocol::FineGrained, .knockout = KnockoutType::None}, 8),
                  Error);
  CHECK_THROWS_AS(plan_sweep({.protocol = Protocol::Global1, .cutoffs = {0}}, 8), Error);
  CHECK_THROWS_AS(plan_sweep({.protocol = Protocol::Single}, 8), Error);
}

TEST_CASE("global2 on the circuit reproduces the asymmetry") {
  const auto task = small_circuit_task();
  const auto records = run_sweep({.protocol = Protocol::Global2}, task);
  REQUIRE(records.size() == 4);
  const auto& base = records[0];
  CHECK(base.performance_ratio == 100.0);
  CHECK(base.logit_drift == 0.0);
  CHECK(base.delta == 0.0);
  CHECK(base.score == 1.0);
  CHECK(records[1].knockout == "LV-K");
  CHECK(records[1].score == 0.25);
  CHECK(records[1].performance_ratio == 25.0);
  CHECK(records[1].logit_drift > 0.0);
  for (int i : {2, 3}) {
    CHECK(records[i].score == 1.0);
    CHECK(records[i].logit_drift == 0.0);
  }
}

TEST_CASE("fine-grained LV-K drift is local to the copy layer") {
  const auto task = small_circuit_task(10, 6);
  const auto records =
      run_sweep({.protocol = Protocol::FineGrained, .knockout = KnockoutType::LVK}, task);
  REQUIRE(records.size() == 8);
  for (size_t i = 1; i < records.size(); ++i) {
    const int x = *records[i].cutoff_or_window_end;
    const bool covers = x - 3 <= 6 && 6 <= x;
    CHECK((records[i].logit_drift > 0.0) == covers);
    if (!covers) CHECK(records[i].delta == 0.0);
  }
}

TEST_CASE("global1 baseline and record metadata") {
  const auto task = small_circuit_task();
  const auto records = run_sweep({.protocol = Protocol::Global1}, task);
  REQUIRE(records.size() == 5);  // {8, 1, 3, 5, 7}
  CHECK(records[0].cutoff_or_window_end == 8);
  CHECK(records[0].layer_ratio == 1.0);
  // Cutoffs before the copy layer lose retrieval, later ones keep it.
  for (const auto& r : records) {
    const int cutoff = *r.cutoff_or_window_end;
    CHECK(r.score == (cutoff >= 5 ? 1.0 : 0.25));
    CHECK(r.layer_ratio == cutoff / 8.0);
    const auto s = parse_schedule(r.schedule);
    CHECK(r.flops_ratio == schedule_flops_ratio(task.layout(), s).percent());
  }
}

TEST_CASE("output order does not depend on the worker count") {
  const auto task = small_circuit_task();
  const SweepSpec spec{.protocol = Protocol::FineGrained, .knockout = KnockoutType::VSK};
  CHECK(run_sweep(spec, task, {1}) == run_sweep(spec, task, {4}));
}

TEST_CASE("task failures name the schedule") {
  const FlakyTask task;
  try {
    run_sweep({.protocol = Protocol::Global2}, task, {2});
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Task);
    CHECK(std::string(e.what()).find("'L L L L'") != std::string::npos);
  }
}

TEST_CASE("drift task on a random model") {
  ModelConfig cfg;
  cfg.depth = 4;
  cfg.seed = 9;
  const DriftTask task(init_model(cfg), build_layout(3, 4, 3), 4, 100);
  const auto records = run_sweep({.protocol = Protocol::Global2}, task);
  REQUIRE(records.size() == 4);
  CHECK(records[0].score == 1.0);
  CHECK(records[0].performance_ratio == 100.0);
  CHECK(records[0].logit_drift == 0.0);
  for (size_t i = 1; i < 4; ++i) CHECK(records[i].logit_drift > 0.0);

  const auto single = run_sweep({.protocol = Protocol::Single, .schedule = baseline_schedule(4)}, task);
  CHECK(single.size() == 1);
}
