#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "llcbench/chain.hpp"

namespace llcbench {

/// beta = beta0 / ln n. Throws ConfigError for n < 3 or beta0 <= 0.
double wbic_beta(std::uint64_t n, double beta0 = 1.0);

struct EstimatorConfig {
  std::uint64_t n = 0;
  double beta0 = 1.0;
  /// Defaults to floor(0.9 T) when unset.
  std::optional<std::int64_t> burn_in;
  /// Subtract the large-batch L(w0) from the trace instead of trace[0].
  bool use_large_batch_l0 = false;

  double beta() const { return wbic_beta(n, beta0); }
  /// n * beta, the temperature multiplying the loss gradient in the samplers.
  double beta_tilde() const { return static_cast<double>(n) * beta(); }
};

struct LlcEstimate {
  double lambda_hat = 0.0;  // NaN when diverged
  double l_bar = 0.0;
  double l0 = 0.0;
  bool diverged = false;
};

/// lambda = n beta (mean(trace[B..T-1]) - trace[0]).
LlcEstimate estimate_llc(const ChainTrace& trace, std::int64_t steps, const EstimatorConfig& cfg);

struct MultiChainEstimate {
  LlcEstimate estimate;
  double diverged_fraction = 0.0;
};

/// Mean over chains with finite estimates.
MultiChainEstimate multi_chain_estimate(const std::vector<LlcEstimate>& estimates);

}  // namespace llcbench
