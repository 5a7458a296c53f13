#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "llcbench/samplers.hpp"
#include "llcbench/taskgen.hpp"

namespace llcbench::bench {

using nlohmann::json;

/// Everything a sweep needs. Keys of the JSON form are the member names.
struct SweepConfig {
  std::string model_class = "1K";
  int num_problems = 30;
  std::vector<Algorithm> algorithms = all_algorithms();
  std::vector<double> step_sizes;
  DatasetSettings dataset;
  std::int64_t batch_size = 100;
  std::int64_t steps = 2000;
  std::optional<std::int64_t> burn_in;
  double beta0 = 1.0;
  double gamma = 1.0;
  int chains = 1;
  double reduce_probability = 0.5;
  std::int64_t l0_batch_size = 0;
  bool use_large_batch_l0 = false;
  AdamSgldHypers adam;
  RmsPropSgldHypers rmsprop;
  SghmcHypers sghmc;
  SgnhtHypers sgnht;
  SamplerVariants variants;
  std::uint64_t master_seed = 0;
  int workers = 1;

  std::int64_t effective_burn_in() const;
  /// Throws ConfigError.
  void validate() const;
};

/// count values log-spaced over [low, high], endpoints included.
std::vector<double> log_space(double low, double high, int count);

/// "desk": class 1K, 30 problems, n = 1e4, m = 100, T = 2000, B = 1800, 8 eps in [1e-6, 1e-2].
/// "full": class 1M by default, 100 problems, n = 1e6, m = 500, T = 5e4, B = 0.9 T, gamma = 1.
SweepConfig preset(const std::string& name);
std::vector<std::string> preset_names();

json to_json(const SweepConfig& cfg);
SweepConfig sweep_config_from_json(const json& j, SweepConfig base = preset("desk"));

/// The part of the config that determines record content (workers excluded).
json content_key(const SweepConfig& cfg);

json task_to_json(const TaskSpec& task, bool include_params = true);
TaskSpec task_from_json(const json& j);

}  // namespace llcbench::bench
