#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "llcbench/bench/metrics.hpp"

namespace llcbench::bench {

/// Groups shown in the mean-vs-std scatter: NaN fraction strictly below this.
inline constexpr double kScatterNanThreshold = 0.10;

bool scatter_eligible(const GroupSummary& g);

struct ReportFiles {
  std::filesystem::path records;
  std::filesystem::path summary;
  std::vector<std::filesystem::path> charts;
};

/// Renders the four charts as SVG documents. Deterministic in the summary.
std::string relative_error_chart(const SweepSummary& s);
std::string nan_fraction_chart(const SweepSummary& s);
std::string mean_std_scatter(const SweepSummary& s);
std::string order_preservation_chart(const SweepSummary& s);

/// Writes records.jsonl (header first), summary.json and the charts into out_dir.
/// Throws IoError before writing anything if out_dir cannot be written.
ReportFiles emit_report(const SweepSummary& summary, const json& records_header,
                        const std::vector<ExperimentRecord>& records, const std::filesystem::path& out_dir);

/// Summary and charts only; the records file is left alone.
ReportFiles emit_charts(const SweepSummary& summary, const std::filesystem::path& out_dir);

}  // namespace llcbench::bench
