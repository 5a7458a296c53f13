#include "llcbench/dataset.hpp"

#include <cmath>
#include <string>

#include "llcbench/rng.hpp"

namespace llcbench {

Dataset::Dataset(DatasetSpec spec) : spec_(std::move(spec)) {
  if (spec_.n < 1) throw ConfigError("dataset: n must be at least 1");
  if (!(spec_.input_low < spec_.input_high)) throw ConfigError("dataset: input_low must be below input_high");
  if (!(spec_.noise_variance >= 0.0)) throw ConfigError("dataset: noise variance must be nonnegative");
  if (!spec_.true_params.all_finite()) throw ContractError("dataset: true parameters must be finite");
  composite_ = composite_matrix(spec_.true_params);
  noise_sd_ = std::sqrt(spec_.noise_variance);
}

void Dataset::sample_into(std::uint64_t i, Eigen::Ref<Vector<double>> x, Eigen::Ref<Vector<double>> y) const {
  CounterStream stream(derive_key(derive_key(spec_.seed, "sample"), i));
  for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = stream.uniform(spec_.input_low, spec_.input_high);
  y.noalias() = composite_ * x;
  if (noise_sd_ > 0.0)
    for (Eigen::Index j = 0; j < y.size(); ++j) y(j) += noise_sd_ * stream.normal();
}

DoubleBatch Dataset::gather(const std::vector<std::uint64_t>& indices) const {
  const auto m = static_cast<Eigen::Index>(indices.size());
  DoubleBatch batch{Matrix<double>(architecture().input_dim(), m), Matrix<double>(architecture().output_dim(), m),
                    indices};
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto i = indices[static_cast<std::size_t>(k)];
    if (i >= spec_.n) throw ContractError("dataset: index " + std::to_string(i) + " out of range");
    sample_into(i, batch.inputs.col(k), batch.targets.col(k));
  }
  return batch;
}

DoubleBatch Dataset::prefix(std::uint64_t count) const {
  if (count < 1 || count > spec_.n) throw ContractError("dataset: prefix length out of range");
  std::vector<std::uint64_t> idx(count);
  for (std::uint64_t i = 0; i < count; ++i) idx[i] = i;
  return gather(idx);
}

std::vector<std::uint64_t> batch_indices(const Dataset& ds, std::int64_t m, std::int64_t t,
                                         std::uint64_t chain_seed) {
  if (m < 1) throw ConfigError("batch size must be positive");
  if (static_cast<std::uint64_t>(m) > ds.size())
    throw ConfigError("batch size " + std::to_string(m) + " exceeds dataset size " + std::to_string(ds.size()));
  const auto chain_key = derive_key(derive_key(ds.spec().seed, "batches"), chain_seed);
  CounterStream stream(derive_key(chain_key, static_cast<std::uint64_t>(t)));
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(m));
  for (auto& i : idx) i = stream.below(ds.size());
  return idx;
}

DoubleBatch sample_batch(const Dataset& ds, std::int64_t m, std::int64_t t, std::uint64_t chain_seed) {
  return ds.gather(batch_indices(ds, m, t, chain_seed));
}

}  // namespace llcbench
