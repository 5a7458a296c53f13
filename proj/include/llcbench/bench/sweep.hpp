#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "llcbench/bench/config.hpp"
#include "llcbench/bench/problems.hpp"

namespace llcbench::bench {

inline constexpr int kRecordSchemaVersion = 1;
inline constexpr const char* kRecordSchema = "llcbench.records";

/// Below this, relative error is undefined and absolute error is recorded instead.
inline constexpr double kRelativeErrorFloor = 1e-9;

struct ExperimentRecord {
  int task_index = 0;
  std::string task_id;
  int layers = 0;
  std::vector<Eigen::Index> sizes;
  Eigen::Index parameter_count = 0;
  Eigen::Index true_rank = 0;
  std::string true_llc;  // exact rational, "p/q"
  double true_llc_value = 0.0;
  Algorithm algorithm = Algorithm::Sgld;
  int step_index = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double lambda_hat = 0.0;  // NaN when diverged or failed
  bool diverged = false;
  double diverged_fraction = 0.0;  // across chains
  std::optional<std::int64_t> divergence_step;
  std::optional<double> relative_error;
  std::optional<double> absolute_error;
  std::optional<double> trace_min;
  std::optional<double> trace_max;
  std::optional<double> trace_final;
  bool failed = false;
  std::string error;
  double wall_time_s = 0.0;

  /// Key identifying the (task, algorithm, step size) cell.
  std::tuple<int, int, int> key() const;
};

json record_to_json(const ExperimentRecord& r);
ExperimentRecord record_from_json(const json& j);

/// Record payload with timing removed, serialized canonically.
std::string canonical_payload(const ExperimentRecord& r);

/// FNV-1a over the canonical payloads of records sorted by key.
std::uint64_t records_digest(std::vector<ExperimentRecord> records);

std::uint64_t record_seed(std::uint64_t master_seed, int task_index, Algorithm algo, int step_index);

/// One (task, algorithm, step size) cell; never throws for sampler divergence.
ExperimentRecord run_experiment(const SweepConfig& cfg, const TaskSpec& task, int task_index, Algorithm algo,
                                int step_index);

struct SweepOptions {
  /// Records are appended here as they complete; empty disables persistence.
  std::filesystem::path records_path;
  /// Keep records already present in records_path when its header matches the config.
  bool resume = false;
  std::function<void(const ExperimentRecord&)> on_record;
};

/// Runs every (task, algorithm, step size) cell and returns records sorted by key.
std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg, const std::vector<TaskSpec>& tasks,
                                        const SweepOptions& options = {});

struct RecordsFile {
  json header;
  std::vector<ExperimentRecord> records;
};

/// Reads a records file; a truncated final line (interrupted write) is ignored.
RecordsFile read_records(const std::filesystem::path& path);

}  // namespace llcbench::bench
