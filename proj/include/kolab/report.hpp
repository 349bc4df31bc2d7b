#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kolab/sweep.hpp"

namespace kolab {

enum class ReportFormat { Csv, Json };

ReportFormat parse_format(std::string_view text);

// Column order of the CSV header; the three *_pct columns follow the data
// columns.
inline constexpr const char* kCsvHeader =
    "protocol,schedule,knockout,cutoff_or_window_end,layer_ratio,score,performance_ratio,delta,"
    "logit_drift,flops_ratio,layer_ratio_pct,performance_ratio_pct,flops_ratio_pct";

std::string render_csv(const std::vector<SweepRecord>& records);
std::string render_json(const std::vector<SweepRecord>& records);
// Inverse of render_json. Throws Error(Parse).
std::vector<SweepRecord> parse_json(std::string_view text);

// Throws Error(Usage) on an empty record list and Error(Io) when the file
// cannot be written. An empty path writes nothing and returns the text.
std::string emit_report(const std::vector<SweepRecord>& records, ReportFormat format,
                        const std::string& path);

}  // namespace kolab
