#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "llcbench/analytic_llc.hpp"
#include "llcbench/dataset.hpp"

namespace llcbench {

struct ModelClass {
  std::string name;
  int min_layers = 1;
  int max_layers = 1;
  Eigen::Index min_width = 1;
  Eigen::Index max_width = 1;
  bool standard = true;
};

/// 100K, 1M, 10M, 100M, plus the desk-scale "1K" class (not a published class).
const std::vector<ModelClass>& builtin_classes();

/// Throws ConfigError for unknown names.
const ModelClass& find_class(const std::string& name);

void validate(const ModelClass& cls);

/// M ~ Uniform{M_min..M_max}, then H_0..H_M ~ Uniform{H_min..H_max} independently.
DlnArchitecture sample_architecture(const ModelClass& cls, std::uint64_t seed);

/// Xavier-normal layers; each layer independently, with probability
/// `reduce_probability`, gets a target rank r_l ~ Uniform{0..min(H_l, H_{l-1})}
/// enforced by zeroing trailing rows or columns (side picked by a fair coin).
Params sample_true_params(const DlnArchitecture& arch, std::uint64_t seed, double reduce_probability = 0.5);

/// Numerical rank with tolerance max(rows, cols) * eps * sigma_max.
Eigen::Index numerical_rank(const Matrix<double>& m);

/// Rank of the composite true matrix W_M ... W_1.
Eigen::Index true_rank(const Params& params);

struct DatasetSettings {
  std::uint64_t n = 10000;
  double input_low = -10.0;
  double input_high = 10.0;
  double noise_variance = 0.25;
};

struct TaskSpec {
  std::string id;
  std::string model_class;
  std::uint64_t seed = 0;
  DlnArchitecture architecture;
  Params true_params;
  Eigen::Index true_rank = 0;
  DatasetSpec dataset;
  std::optional<LlcValue> true_llc;

  Eigen::Index parameter_count() const { return architecture.parameter_count(); }
};

/// Everything is derived from `seed`: architecture, parameters and dataset seed.
/// The analytic LLC is left empty; see attach_llc.
TaskSpec generate_task(const ModelClass& cls, std::uint64_t seed, const DatasetSettings& data,
                       double reduce_probability = 0.5);

/// Builds a task from explicit parameters (rank is computed, LLC left empty).
TaskSpec make_task(std::string id, const Params& true_params, std::uint64_t data_seed, const DatasetSettings& data);

/// Fills task.true_llc; throws LlcError when no ground truth can be emitted.
void attach_llc(TaskSpec& task);

}  // namespace llcbench
