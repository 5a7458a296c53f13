#pragma once

#include <cstdint>
#include <vector>

#include "llcbench/taskgen.hpp"

namespace llcbench::bench {

struct DegreeProbeOptions {
  int directions = 4;
  /// Spans at least three decades; the slope is fitted over the top decade.
  std::vector<double> t_grid{10.0, 31.6227766, 100.0, 316.227766, 1000.0, 3162.27766, 10000.0};
  std::uint64_t probe_samples = 1000;  // capped at n
  std::uint64_t seed = 0;
};

struct DegreeProbeResult {
  int expected_degree = 0;   // 2M
  std::vector<double> slopes;  // one per direction
};

/// Growth rate of the empirical loss along random unit directions: the slope of
/// log L(w0 + t v) against log t over the top decade of t_grid.
DegreeProbeResult degree_probe(const TaskSpec& task, const DegreeProbeOptions& options);

/// Same, along caller-supplied directions (normalized internally).
DegreeProbeResult degree_probe(const TaskSpec& task, const std::vector<Vector<double>>& directions,
                               const DegreeProbeOptions& options);

}  // namespace llcbench::bench
