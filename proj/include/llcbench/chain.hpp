#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "llcbench/dataset.hpp"
#include "llcbench/samplers.hpp"

namespace llcbench {

struct ChainConfig {
  std::int64_t steps = 2000;
  std::int64_t batch_size = 100;
  /// When positive, also evaluate L(w0) on a separate batch of this size (off by default).
  std::int64_t l0_batch_size = 0;
};

struct ChainTrace {
  /// losses[t] = L_{m,t}(w_t), recorded before step t; losses[0] is the loss at w0.
  std::vector<double> losses;
  bool diverged = false;
  std::optional<std::int64_t> divergence_step;
  std::optional<double> l0_large_batch;
};

/// Runs T steps from w0 = the dataset's true parameters. The first non-finite
/// loss or parameter stops the chain and sets the divergence flag; no exception.
ChainTrace run_chain(const Dataset& data, const SamplerConfig& sampler, const ChainConfig& chain,
                     std::uint64_t chain_seed);

}  // namespace llcbench
