#include "llcbench/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "llcbench/rng.hpp"

namespace llcbench {

const std::vector<ModelClass>& builtin_classes() {
  static const std::vector<ModelClass> classes{
      {"1K", 2, 4, 4, 12, false},
      {"100K", 2, 10, 50, 500, true},
      {"1M", 2, 20, 100, 1000, true},
      {"10M", 2, 20, 500, 2000, true},
      {"100M", 2, 40, 500, 3000, true},
  };
  return classes;
}

const ModelClass& find_class(const std::string& name) {
  for (const auto& c : builtin_classes())
    if (c.name == name) return c;
  throw ConfigError("unknown model class '" + name + "'");
}

void validate(const ModelClass& cls) {
  if (cls.min_layers < 1 || cls.min_layers > cls.max_layers)
    throw ConfigError("model class " + cls.name + ": need 1 <= M_min <= M_max");
  if (cls.min_width < 1 || cls.min_width > cls.max_width)
    throw ConfigError("model class " + cls.name + ": need 1 <= H_min <= H_max");
}

DlnArchitecture sample_architecture(const ModelClass& cls, std::uint64_t seed) {
  validate(cls);
  CounterStream stream(derive_key(seed, "architecture"));
  const auto layers = stream.between(cls.min_layers, cls.max_layers);
  std::vector<Eigen::Index> sizes(static_cast<std::size_t>(layers) + 1);
  for (auto& h : sizes) h = stream.between(cls.min_width, cls.max_width);
  return DlnArchitecture(std::move(sizes));
}

Params sample_true_params(const DlnArchitecture& arch, std::uint64_t seed, double reduce_probability) {
  Params params(arch);
  CounterStream stream(derive_key(seed, "true-params"));
  for (int l = 0; l < arch.layers(); ++l) {
    auto w = params.layer(l);
    const double sd = std::sqrt(2.0 / static_cast<double>(w.rows() + w.cols()));
    stream.fill_normal(w);
    w *= sd;

    // u < p with p = 0 never reduces, p = 1 always does
    if (stream.uniform() < reduce_probability) {
      const auto full = std::min(w.rows(), w.cols());
      const auto target = stream.between(0, full);
      const auto drop = full - target;
      if (drop > 0) {
        if (stream.coin())
          w.bottomRows(drop).setZero();
        else
          w.rightCols(drop).setZero();
      }
    }
  }
  return params;
}

Eigen::Index numerical_rank(const Matrix<double>& m) {
  if (m.size() == 0) return 0;
  if (!m.allFinite()) throw ComputationError("numerical_rank: non-finite matrix");
  Eigen::BDCSVD<Matrix<double>> svd(m);
  if (svd.info() != Eigen::Success) throw ComputationError("numerical_rank: SVD did not converge");
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double tol =
      static_cast<double>(std::max(m.rows(), m.cols())) * std::numeric_limits<double>::epsilon() * s(0);
  return (s.array() > tol).count();
}

Eigen::Index true_rank(const Params& params) { return numerical_rank(composite_matrix(params)); }

TaskSpec make_task(std::string id, const Params& true_params, std::uint64_t data_seed, const DatasetSettings& data) {
  TaskSpec task;
  task.id = std::move(id);
  task.architecture = true_params.architecture();
  task.true_params = true_params;
  task.true_rank = true_rank(true_params);
  task.dataset = DatasetSpec{data.n, data.input_low, data.input_high, data.noise_variance, data_seed, true_params};
  return task;
}

TaskSpec generate_task(const ModelClass& cls, std::uint64_t seed, const DatasetSettings& data,
                       double reduce_probability) {
  auto arch = sample_architecture(cls, seed);
  auto params = sample_true_params(arch, seed, reduce_probability);
  auto task = make_task(cls.name + "-" + std::to_string(seed), params, derive_key(seed, "dataset"), data);
  task.model_class = cls.name;
  task.seed = seed;
  return task;
}

void attach_llc(TaskSpec& task) { task.true_llc = analytic_llc(task.architecture, task.true_rank); }

}  // namespace llcbench
