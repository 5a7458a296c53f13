#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "llcbench/bench/report.hpp"

using namespace llcbench;
using namespace llcbench::bench;
namespace fs = std::filesystem;

namespace {

GroupSummary group(Algorithm algo, int step, double eps, double nan_fraction, double mean, double sd) {
  GroupSummary g;
  g.algorithm = algo;
  g.step_index = step;
  g.epsilon = eps;
  g.count = 10;
  g.nan_count = static_cast<std::size_t>(nan_fraction * 10 + 0.5);
  g.finite_count = g.count - g.nan_count;
  g.relative_count = g.finite_count;
  g.nan_fraction = nan_fraction;
  if (g.finite_count) {
    g.mean_relative_error = mean;
    g.std_relative_error = sd;
  }
  g.order_preservation = 0.7;
  return g;
}

SweepSummary sample_summary() {
  SweepSummary s;
  s.groups = {group(Algorithm::Sgld, 0, 1e-6, 0.0, -0.3, 0.2), group(Algorithm::Sgld, 1, 1e-4, 0.10, 0.1, 0.5),
              group(Algorithm::Sgld, 2, 1e-2, 1.0, 0, 0), group(Algorithm::RmsPropSgld, 0, 1e-6, 0.05, 0.02, 0.1),
              group(Algorithm::RmsPropSgld, 1, 1e-4, 0.0, 0.4, 0.3)};
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("scatter keeps groups strictly below 10% NaN") {
  const auto s = sample_summary();
  CHECK(scatter_eligible(s.groups[0]));
  CHECK_FALSE(scatter_eligible(s.groups[1]));  // exactly 0.10
  CHECK_FALSE(scatter_eligible(s.groups[2]));
  CHECK(scatter_eligible(s.groups[3]));
  auto empty = s.groups[0];
  empty.count = 0;
  CHECK_FALSE(scatter_eligible(empty));

  // the excluded groups still appear in the line charts; each legend adds one marker per algorithm
  const auto scatter = mean_std_scatter(s), lines = nan_fraction_chart(s);
  CHECK(count(scatter, "<circle") == 3 + 2);
  CHECK(count(lines, "<circle") == 5 + 2);
}

TEST_CASE("charts use a log step-size axis") {
  const auto svg = nan_fraction_chart(sample_summary());
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find(">1e-6<") != std::string::npos);
  CHECK(svg.find(">1e-2<") != std::string::npos);
  CHECK(svg.find("SGLD") != std::string::npos);
  CHECK(svg.find("RMSPropSGLD") != std::string::npos);
  CHECK(relative_error_chart(sample_summary()).find(">1e-6<") != std::string::npos);
  CHECK(order_preservation_chart(sample_summary()).find("</svg>") != std::string::npos);
}

TEST_CASE("emitting is deterministic and writes every file") {
  const auto dir = fs::temp_directory_path() / "llcbench-test-report";
  fs::remove_all(dir);
  const auto summary = sample_summary();
  const json header{{"schema", kRecordSchema}, {"version", kRecordSchemaVersion}};
  ExperimentRecord rec;
  rec.task_id = "t0";
  const auto a = emit_report(summary, header, {rec}, dir / "a");
  const auto b = emit_report(summary, header, {rec}, dir / "b");
  REQUIRE(a.charts.size() == 4);
  CHECK(fs::exists(a.records));
  CHECK(slurp(a.summary) == slurp(b.summary));
  for (std::size_t i = 0; i < a.charts.size(); ++i) CHECK(slurp(a.charts[i]) == slurp(b.charts[i]));
  CHECK(summary_to_json(summary_from_json(json::parse(slurp(a.summary)))) == summary_to_json(summary));
  CHECK(read_records(a.records).records.size() == 1);

  const auto charts = emit_charts(summary, dir / "c");
  CHECK(charts.records.empty());
  CHECK(fs::exists(charts.summary));
  fs::remove_all(dir);
}

TEST_CASE("an unwritable output directory is an I/O error") {
  const auto dir = fs::temp_directory_path() / "llcbench-test-report-file";
  fs::remove_all(dir);
  { std::ofstream(dir) << "not a directory"; }
  CHECK_THROWS_AS(emit_charts(sample_summary(), dir), IoError);
  CHECK_THROWS_AS(emit_charts(sample_summary(), dir / "below"), IoError);
  fs::remove(dir);
}
