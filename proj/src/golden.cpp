#include "kolab/golden.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kolab/error.hpp"

namespace kolab {

namespace {

struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void add(std::int64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  }
};

}  // namespace

std::uint64_t config_hash(const ModelConfig& c) {
  Fnv f;
  for (std::int64_t v : {std::int64_t{c.depth}, std::int64_t{c.model_dim}, std::int64_t{c.head_count},
                         std::int64_t{c.ffn_dim}, std::int64_t{c.vocab_size},
                         std::int64_t{c.effective_rotary_dims()},
                         static_cast<std::int64_t>(c.rope_base)}) {
    f.add(v);
  }
  return f.h;
}

std::uint64_t input_hash(const TokenLayout& layout, std::span<const int> tokens) {
  Fnv f;
  f.add(layout.num_frames());
  f.add(layout.tokens_per_frame());
  f.add(layout.text_len());
  for (int t : tokens) f.add(t);
  return f.h;
}

GoldenTrace make_golden(const ModelConfig& config, const TokenLayout& layout,
                        std::span<const int> tokens, const LayerSchedule& schedule,
                        const ForwardTrace& trace) {
  return {config_hash(config), config.seed, input_hash(layout, tokens), render_schedule(schedule),
          trace.vocab_size, trace.logits};
}

void write_golden(const GoldenTrace& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  char buf[64];
  out << "# knockout-lab golden trace\n";
  std::snprintf(buf, sizeof buf, "%016" PRIx64, g.config_hash);
  out << "config_hash " << buf << "\n";
  out << "seed " << g.seed << "\n";
  std::snprintf(buf, sizeof buf, "%016" PRIx64, g.input_hash);
  out << "input_hash " << buf << "\n";
  out << "schedule " << g.schedule << "\n";
  out << "vocab " << g.vocab_size << "\n";
  out << "values " << g.logits.size() << "\n";
  for (float v : g.logits) {
    std::snprintf(buf, sizeof buf, "%a", static_cast<double>(v));
    out << buf << "\n";
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

GoldenTrace read_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  GoldenTrace g;
  std::string line;
  size_t count = 0;
  bool have_count = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto space = line.find(' ');
    const std::string key = line.substr(0, space);
    const std::string value = space == std::string::npos ? "" : line.substr(space + 1);
    if (key == "config_hash") g.config_hash = std::strtoull(value.c_str(), nullptr, 16);
    else if (key == "seed") g.seed = std::strtoull(value.c_str(), nullptr, 10);
    else if (key == "input_hash") g.input_hash = std::strtoull(value.c_str(), nullptr, 16);
    else if (key == "schedule") g.schedule = value;
    else if (key == "vocab") g.vocab_size = std::atoi(value.c_str());
    else if (key == "values") {
      count = std::strtoull(value.c_str(), nullptr, 10);
      have_count = true;
      break;
    } else {
      throw Error(ErrorKind::Parse, "unknown golden key '" + key + "'");
    }
  }
  if (!have_count) throw Error(ErrorKind::Parse, "golden file has no values section");
  g.logits.reserve(count);
  while (g.logits.size() < count && std::getline(in, line)) {
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) throw Error(ErrorKind::Parse, "bad golden value '" + line + "'");
    g.logits.push_back(static_cast<float>(v));
  }
  if (g.logits.size() != count) throw Error(ErrorKind::Parse, "golden file truncated");
  return g;
}

}  // namespace kolab
