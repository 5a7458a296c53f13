#include "llcbench/estimator.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace llcbench {

double wbic_beta(std::uint64_t n, double beta0) {
  if (n < 3) throw ConfigError("beta = beta0 / ln n needs n >= 3, got " + std::to_string(n));
  if (!(beta0 > 0.0)) throw ConfigError("beta0 must be positive");
  return beta0 / std::log(static_cast<double>(n));
}

LlcEstimate estimate_llc(const ChainTrace& trace, std::int64_t steps, const EstimatorConfig& cfg) {
  if (steps < 2) throw ConfigError("estimator: need at least two steps");
  const auto burn_in = cfg.burn_in.value_or(static_cast<std::int64_t>(std::floor(0.9 * static_cast<double>(steps))));
  if (burn_in < 0 || burn_in >= steps) throw ConfigError("estimator: empty post-burn-in window");
  const double nbeta = cfg.beta_tilde();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  LlcEstimate out;
  out.l0 = trace.losses.empty() ? nan : trace.losses.front();
  if (cfg.use_large_batch_l0) {
    if (!trace.l0_large_batch) throw ConfigError("estimator: trace carries no large-batch L0");
    out.l0 = *trace.l0_large_batch;
  }
  if (trace.diverged || static_cast<std::int64_t>(trace.losses.size()) < steps) {
    out.l_bar = nan;
    out.lambda_hat = nan;
    out.diverged = true;
    return out;
  }

  // accumulate differences from L0 so a frozen trace gives exactly zero
  double excess = 0.0;
  for (std::int64_t t = burn_in; t < steps; ++t) excess += trace.losses[static_cast<std::size_t>(t)] - out.l0;
  excess /= static_cast<double>(steps - burn_in);
  out.l_bar = out.l0 + excess;
  out.lambda_hat = nbeta * excess;
  if (!std::isfinite(out.lambda_hat)) {
    out.lambda_hat = nan;
    out.diverged = true;
  }
  return out;
}

MultiChainEstimate multi_chain_estimate(const std::vector<LlcEstimate>& estimates) {
  if (estimates.empty()) throw ContractError("multi_chain_estimate: no chains");
  MultiChainEstimate out;
  double lambda = 0.0, l_bar = 0.0, l0 = 0.0;
  std::size_t finite = 0;
  for (const auto& e : estimates) {
    if (e.diverged || !std::isfinite(e.lambda_hat)) continue;
    lambda += e.lambda_hat;
    l_bar += e.l_bar;
    l0 += e.l0;
    ++finite;
  }
  out.diverged_fraction = 1.0 - static_cast<double>(finite) / static_cast<double>(estimates.size());
  if (finite == 0) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    out.estimate = {nan, nan, nan, true};
    return out;
  }
  const auto k = static_cast<double>(finite);
  out.estimate = {lambda / k, l_bar / k, l0 / k, false};
  return out;
}

}  // namespace llcbench
