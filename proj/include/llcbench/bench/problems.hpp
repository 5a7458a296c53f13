#pragma once

#include <string>
#include <vector>

#include "llcbench/bench/config.hpp"

namespace llcbench::bench {

struct SkippedTask {
  int problem_index = 0;
  std::uint64_t seed = 0;
  std::string reason;
};

struct ProblemSet {
  std::vector<TaskSpec> tasks;
  std::vector<SkippedTask> skipped;
};

/// Seed of problem p, attempt k. Attempts past the first only happen when the
/// analytic LLC of the previous attempt could not be established.
std::uint64_t problem_seed(std::uint64_t master_seed, int problem, int attempt);

/// num_problems tasks, each with a ground-truth LLC. Tasks without one are
/// replaced by the next attempt and logged in `skipped`. Throws ConfigError
/// when more than half of all attempts are skipped.
ProblemSet generate_problems(const SweepConfig& cfg);

}  // namespace llcbench::bench
