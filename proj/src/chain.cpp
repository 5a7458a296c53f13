#include "llcbench/chain.hpp"

#include <cmath>

namespace llcbench {

ChainTrace run_chain(const Dataset& data, const SamplerConfig& sampler, const ChainConfig& chain,
                     std::uint64_t chain_seed) {
  sampler.validate();
  if (chain.steps < 1) throw ConfigError("chain: steps must be positive");
  if (chain.batch_size < 1 || static_cast<std::uint64_t>(chain.batch_size) > data.size())
    throw ConfigError("chain: batch size must be in [1, n]");

  const auto& arch = data.architecture();
  const VectorXd& anchor = data.spec().true_params.flat();
  CounterStream noise_stream(derive_key(chain_seed, "sampler-noise"));
  auto state = init_state(sampler, anchor, noise_stream);

  ChainTrace trace;
  trace.losses.reserve(static_cast<std::size_t>(chain.steps));
  if (chain.l0_batch_size > 0) {
    const auto b = sample_batch(data, chain.l0_batch_size, -1, derive_key(chain_seed, "l0"));
    trace.l0_large_batch = batch_loss(data.spec().true_params, b);
  }

  VectorXd noise(anchor.size());
  for (std::int64_t t = 0; t < chain.steps; ++t) {
    const Params w(arch, position(state));
    const auto batch = sample_batch(data, chain.batch_size, t, chain_seed);
    const auto [loss, grad] = batch_loss_and_gradient(w, batch);
    if (!std::isfinite(loss) || !w.all_finite()) {
      trace.diverged = true;
      trace.divergence_step = t;
      break;
    }
    trace.losses.push_back(loss);
    noise_stream.fill_normal(noise);
    step(state, sampler, anchor, grad.flat(), noise);
  }
  return trace;
}

}  // namespace llcbench
