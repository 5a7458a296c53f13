#pragma once

#include <cstdint>

#include "llcbench/dln.hpp"

namespace llcbench {

/// A regression dataset that is never materialized. Sample i is a pure function
/// of (seed, i): X_i ~ Uniform[low, high]^N, Y_i = W0 X_i + N_i, N_i ~ Normal(0, sigma^2 I).
struct DatasetSpec {
  std::uint64_t n = 0;
  double input_low = -10.0;
  double input_high = 10.0;
  double noise_variance = 0.25;
  std::uint64_t seed = 0;
  Params true_params;
};

class Dataset {
 public:
  explicit Dataset(DatasetSpec spec);

  const DatasetSpec& spec() const noexcept { return spec_; }
  const DlnArchitecture& architecture() const noexcept { return spec_.true_params.architecture(); }
  std::uint64_t size() const noexcept { return spec_.n; }
  const Matrix<double>& true_composite() const noexcept { return composite_; }

  /// Writes input and target of sample i; x has length N, y length N'.
  void sample_into(std::uint64_t i, Eigen::Ref<Vector<double>> x, Eigen::Ref<Vector<double>> y) const;

  DoubleBatch gather(const std::vector<std::uint64_t>& indices) const;

  /// The first `count` samples, e.g. for full-data loss evaluations on small n.
  DoubleBatch prefix(std::uint64_t count) const;

 private:
  DatasetSpec spec_;
  Matrix<double> composite_;
  double noise_sd_;
};

/// Minibatch U_t of a chain: m indices drawn uniformly with replacement, a pure
/// function of (dataset seed, chain_seed, t). Throws ConfigError when m > n.
std::vector<std::uint64_t> batch_indices(const Dataset& ds, std::int64_t m, std::int64_t t,
                                         std::uint64_t chain_seed);

DoubleBatch sample_batch(const Dataset& ds, std::int64_t m, std::int64_t t, std::uint64_t chain_seed);

}  // namespace llcbench
