#include "kolab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "kolab/circuit.hpp"
#include "kolab/error.hpp"
#include "kolab/flops.hpp"
#include "kolab/report.hpp"
#include "kolab/sweep.hpp"

namespace kolab {

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  int frames = 8;
  int tokens_per_frame = 4;
  int text = 2;
  int depth = 8;
  int dim = 32;
  int heads = 4;
  int ffn = 64;
  int vocab = 128;
  std::uint64_t seed = 7;
  int inputs = 8;
  bool circuit = false;
  int options = 4;
  int copy_layer = 5;
  std::string schedule;
  std::optional<int> exit_layer;
  int spatial_window = 0;
  std::string knockout = "LVK";
  int window_len = 4;
  int stride = 1;
  std::vector<int> cutoffs;
  std::string protocol = "global2";
  std::string format = "csv";
  std::string out_path;
  int workers = 0;
  bool dense = false;
  bool depth_given = false;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Task:
    case ErrorKind::Shape:
      return kExitRuntime;
    default:
      return kExitUsage;
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::unique_ptr<Task> make_task(const RunConfig& rc, const TokenLayout& layout) {
  if (rc.circuit) {
    CircuitOptions opts;
    opts.depth = rc.depth;
    opts.copy_layer = rc.copy_layer;
    opts.vocab_size = std::max(rc.options + 2, 3);
    return std::make_unique<CircuitTask>(
        build_retrieval_circuit(layout, default_markers(rc.options), opts));
  }
  ModelConfig cfg;
  cfg.depth = rc.depth;
  cfg.model_dim = rc.dim;
  cfg.head_count = rc.heads;
  cfg.ffn_dim = rc.ffn;
  cfg.vocab_size = rc.vocab;
  cfg.seed = rc.seed;
  validate(cfg);
  return std::make_unique<DriftTask>(init_model(cfg), layout, rc.inputs, rc.seed ^ 0x9e3779b97f4a7c15ull);
}

void write_report(const std::vector<SweepRecord>& records, const RunConfig& rc, std::ostream& out) {
  const ReportFormat format = parse_format(rc.format);
  const std::string text = emit_report(records, format, rc.out_path);
  if (rc.out_path.empty()) {
    out << text;
  } else {
    out << "wrote " << records.size() << " records to " << rc.out_path << "\n";
    out << kCostConvention << "\n";
  }
}

int cmd_sweep(const RunConfig& rc, Protocol protocol, std::ostream& out) {
  const TokenLayout layout = build_layout(rc.frames, rc.tokens_per_frame, rc.text);
  SweepSpec spec;
  spec.protocol = protocol;
  spec.knockout = parse_knockout(rc.knockout);
  spec.window_len = rc.window_len;
  spec.stride = rc.stride;
  spec.cutoffs = rc.cutoffs;
  if (protocol == Protocol::Single) {
    if (rc.schedule.empty()) throw Error(ErrorKind::Usage, "run needs --schedule");
    spec.schedule = parse_schedule(rc.schedule);
  }
  RunConfig effective = rc;
  if (spec.schedule && !rc.depth_given) effective.depth = spec.schedule->depth();
  plan_sweep(spec, effective.depth);  // validates before any model work
  const auto task = make_task(effective, layout);
  write_report(run_sweep(spec, *task, {rc.workers}), rc, out);
  return 0;
}

int cmd_flops(const RunConfig& rc, std::ostream& out) {
  const TokenLayout layout = build_layout(rc.frames, rc.tokens_per_frame, rc.text);
  const LayerSchedule schedule =
      rc.schedule.empty() ? schedule_efficiency(rc.depth, rc.spatial_window, rc.exit_layer.value_or(rc.depth))
                          : parse_schedule(rc.schedule);
  if (!rc.schedule.empty() && rc.depth_given && schedule.depth() != rc.depth) {
    throw Error(ErrorKind::Usage, "schedule has " + std::to_string(schedule.depth()) +
                                      " layers but --depth is " + std::to_string(rc.depth));
  }
  const CostView view = rc.dense ? CostView::Dense : CostView::Skipped;
  const auto rows = flops_table(layout, schedule, view);
  const auto ratio = schedule_flops_ratio(layout, schedule, view);

  std::ostringstream csv;
  csv << "layer,knockout,video_present,pairs,cumulative_ratio\n";
  for (const auto& r : rows) {
    csv << r.layer << ',' << name_of(r.knockout) << ',' << (r.video_present ? 1 : 0) << ','
        << r.pairs << ',' << fixed(r.cumulative_ratio, 6) << '\n';
  }

  if (!rc.out_path.empty()) {
    std::ofstream file(rc.out_path, std::ios::binary);
    if (!file) throw Error(ErrorKind::Io, "cannot open '" + rc.out_path + "' for writing");
    file << csv.str();
    if (!file) throw Error(ErrorKind::Io, "failed writing '" + rc.out_path + "'");
  }

  out << "layout: " << rc.frames << " frames x " << rc.tokens_per_frame << " tokens + "
      << rc.text << " text tokens (S = " << layout.total_len() << ")\n";
  out << "schedule: " << render_schedule(schedule) << "\n";
  if (rc.format == "csv" && rc.out_path.empty()) {
    out << csv.str();
  } else {
    out << "layer  knockout  video  pairs         cumulative\n";
    for (const auto& r : rows) {
      char line[128];
      std::snprintf(line, sizeof line, "%5d  %-8s  %-5s  %-12llu  %s\n", r.layer,
                    std::string(name_of(r.knockout)).c_str(), r.video_present ? "yes" : "no",
                    static_cast<unsigned long long>(r.pairs), fixed(r.cumulative_ratio, 4).c_str());
      out << line;
    }
  }
  out << "convention: " << kCostConvention << "; "
      << (rc.dense ? "masked pairs still computed (dense view)" : "blocked pairs skipped")
      << "; text_len = " << rc.text << "\n";
  out << "attention FLOPs ratio: " << ratio.to_string() << "\n";
  return 0;
}

int cmd_circuit_demo(const RunConfig& base, std::ostream& out) {
  RunConfig rc = base;
  rc.circuit = true;
  const TokenLayout layout = build_layout(rc.frames, rc.tokens_per_frame, rc.text);
  SweepSpec spec;
  spec.protocol = parse_protocol(rc.protocol);
  spec.knockout = parse_knockout(rc.knockout);
  spec.window_len = rc.window_len;
  spec.stride = rc.stride;
  spec.cutoffs = rc.cutoffs;
  if (spec.protocol == Protocol::Single) {
    if (rc.schedule.empty()) throw Error(ErrorKind::Usage, "single protocol needs --schedule");
    spec.schedule = parse_schedule(rc.schedule);
  }
  plan_sweep(spec, rc.depth);
  const auto task = make_task(rc, layout);
  const auto records = run_sweep(spec, *task, {rc.workers});

  const auto& circuit = static_cast<const CircuitTask&>(*task);
  out << "retrieval circuit: depth " << rc.depth << ", copy layer " << rc.copy_layer << ", "
      << rc.options << " options, " << circuit.instance_count() << " marker placements\n";
  out << "baseline accuracy " << fixed(records.front().score.value_or(0.0), 2) << "\n";
  out << "schedule                          knockout  at   accuracy  perf_ratio  logit_drift\n";
  for (size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    char line[256];
    std::snprintf(line, sizeof line, "%-32s  %-8s  %-3s  %-8s  %-10s  %.6g\n", r.schedule.c_str(),
                  r.knockout.c_str(),
                  r.cutoff_or_window_end ? std::to_string(*r.cutoff_or_window_end).c_str() : "-",
                  fixed(r.score.value_or(0.0), 2).c_str(),
                  r.performance_ratio ? fixed(*r.performance_ratio, 1).c_str() : "-",
                  r.logit_drift);
    out << line;
  }
  if (!rc.out_path.empty()) {
    emit_report(records, parse_format(rc.format), rc.out_path);
    out << "wrote " << records.size() << " records to " << rc.out_path << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Attention-knockout laboratory for toy video-language transformers", "knockout_lab"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value file; command-line flags override it");

  app.add_option("--frames", rc.frames, "Video frames N")->check(CLI::PositiveNumber);
  app.add_option("--tokens-per-frame", rc.tokens_per_frame, "Tokens per frame P");
  app.add_option("--text", rc.text, "Text tokens T");
  app.add_option("--depth", rc.depth, "Layer count L");
  app.add_option("--dim", rc.dim, "Model width");
  app.add_option("--heads", rc.heads, "Attention heads");
  app.add_option("--ffn", rc.ffn, "FFN hidden width");
  app.add_option("--vocab", rc.vocab, "Vocabulary size");
  app.add_option("--seed", rc.seed, "Weight seed");
  app.add_option("--inputs", rc.inputs, "Random probe inputs for drift tasks");
  app.add_flag("--circuit", rc.circuit, "Use the hand-built retrieval circuit as model and task");
  app.add_option("--options", rc.options, "Answer options for the retrieval circuit");
  app.add_option("--copy-layer", rc.copy_layer, "Copy layer of the retrieval circuit");
  app.add_option("--schedule", rc.schedule, "Schedule string, e.g. \"N N L L exit=2\"");
  app.add_option("--exit", rc.exit_layer, "Exit video tokens after this layer");
  app.add_option("--spatial-window", rc.spatial_window, "Layers 1..s restricted to spatial attention");
  app.add_option("--knockout", rc.knockout, "Knockout type for window sweeps (L, T, S)");
  app.add_option("--window-len", rc.window_len, "Sliding window length");
  app.add_option("--stride", rc.stride, "Sliding window stride");
  app.add_option("--cutoffs", rc.cutoffs, "Global setting 1 cutoffs (default 1,3,5,... plus L)")
      ->delimiter(',');
  app.add_option("--protocol", rc.protocol, "circuit-demo protocol: global1, global2, window, efficiency");
  app.add_option("--format", rc.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", rc.out_path, "Output path (stdout when omitted)");
  app.add_option("--workers", rc.workers, "Concurrent sweep evaluations (default: KNOCKOUT_LAB_WORKERS)");
  app.add_flag("--dense", rc.dense, "flops: count masked pairs as computed");

  auto* global1 = app.add_subcommand("sweep-global1", "LV-K beyond a cutoff depth");
  auto* global2 = app.add_subcommand("sweep-global2", "Each knockout type on every layer");
  auto* window = app.add_subcommand("sweep-window", "Knockout inside a sliding layer window");
  auto* run = app.add_subcommand("run", "A single schedule against the baseline");
  auto* flops = app.add_subcommand("flops", "Attention pair counts and FLOPs ratio");
  auto* demo = app.add_subcommand("circuit-demo", "Protocols on the retrieval circuit");

  std::vector<std::string> argv;
  argv.reserve(args.size());
  for (auto it = args.rbegin(); it != args.rend(); ++it) argv.push_back(*it);

  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  rc.depth_given = app.count("--depth") > 0;

  try {
    if (global1->parsed()) return cmd_sweep(rc, Protocol::Global1, out);
    if (global2->parsed()) return cmd_sweep(rc, Protocol::Global2, out);
    if (window->parsed()) return cmd_sweep(rc, Protocol::FineGrained, out);
    if (run->parsed()) return cmd_sweep(rc, Protocol::Single, out);
    if (flops->parsed()) return cmd_flops(rc, out);
    if (demo->parsed()) return cmd_circuit_demo(rc, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  err << "usage error: no subcommand\n";
  return kExitUsage;
}

}  // namespace kolab
