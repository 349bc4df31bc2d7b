#include "kolab/report.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "kolab/error.hpp"
#include "kolab/flops.hpp"

namespace kolab {

namespace {

using nlohmann::json;

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string one_decimal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

ReportFormat parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  throw Error(ErrorKind::Usage, "format must be csv or json, got '" + std::string(text) + "'");
}

std::string render_csv(const std::vector<SweepRecord>& records) {
  std::string out = kCsvHeader;
  out.push_back('\n');
  for (const auto& r : records) {
    out += csv_field(r.protocol) + ',' + csv_field(r.schedule) + ',' + csv_field(r.knockout) + ',';
    out += (r.cutoff_or_window_end ? std::to_string(*r.cutoff_or_window_end) : "") + ',';
    out += full(r.layer_ratio) + ',';
    out += (r.score ? full(*r.score) : "") + ',';
    out += (r.performance_ratio ? full(*r.performance_ratio) : "") + ',';
    out += (r.delta ? full(*r.delta) : "") + ',';
    out += full(r.logit_drift) + ',' + full(r.flops_ratio) + ',';
    out += one_decimal(100.0 * r.layer_ratio) + ',';
    out += (r.performance_ratio ? one_decimal(*r.performance_ratio) : "") + ',';
    out += one_decimal(r.flops_ratio) + '\n';
  }
  return out;
}

std::string render_json(const std::vector<SweepRecord>& records) {
  json rows = json::array();
  for (const auto& r : records) {
    rows.push_back({
        {"protocol", r.protocol},
        {"schedule", r.schedule},
        {"knockout", r.knockout},
        {"cutoff_or_window_end", opt(r.cutoff_or_window_end)},
        {"layer_ratio", r.layer_ratio},
        {"score", opt(r.score)},
        {"performance_ratio", opt(r.performance_ratio)},
        {"delta", opt(r.delta)},
        {"logit_drift", r.logit_drift},
        {"flops_ratio", r.flops_ratio},
        {"layer_ratio_pct", one_decimal(100.0 * r.layer_ratio)},
        {"performance_ratio_pct",
         r.performance_ratio ? json(one_decimal(*r.performance_ratio)) : json(nullptr)},
        {"flops_ratio_pct", one_decimal(r.flops_ratio)},
    });
  }
  json doc = {{"cost_convention", kCostConvention}, {"records", rows}};
  return doc.dump(2) + "\n";
}

std::vector<SweepRecord> parse_json(std::string_view text) {
  std::vector<SweepRecord> out;
  try {
    const json doc = json::parse(text);
    for (const auto& j : doc.at("records")) {
      SweepRecord r;
      r.protocol = j.at("protocol").get<std::string>();
      r.schedule = j.at("schedule").get<std::string>();
      r.knockout = j.at("knockout").get<std::string>();
      r.cutoff_or_window_end = opt_from<int>(j, "cutoff_or_window_end");
      r.layer_ratio = j.at("layer_ratio").get<double>();
      r.score = opt_from<double>(j, "score");
      r.performance_ratio = opt_from<double>(j, "performance_ratio");
      r.delta = opt_from<double>(j, "delta");
      r.logit_drift = j.at("logit_drift").get<double>();
      r.flops_ratio = j.at("flops_ratio").get<double>();
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("bad report JSON: ") + e.what());
  }
  return out;
}

std::string emit_report(const std::vector<SweepRecord>& records, ReportFormat format,
                        const std::string& path) {
  if (records.empty()) throw Error(ErrorKind::Usage, "report needs at least one record");
  std::string text = format == ReportFormat::Csv ? render_csv(records) : render_json(records);
  if (!path.empty()) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    file << text;
    file.close();
    if (!file) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
  }
  return text;
}

}  // namespace kolab
