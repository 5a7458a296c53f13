#pragma once

// Stochastic-gradient MCMC samplers localized at an anchor w0.
//
// Every algorithm drifts along -(eps/2) (gamma (w - w0) + beta_tilde g) where g is
// the minibatch mean-loss gradient. The adaptive samplers (AdamSGLD,
// RMSPropSGLD) build their moment estimates from g alone; the prior term never
// enters them. Step functions are deterministic given the injected noise, which
// makes each one checkable against hand arithmetic.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "llcbench/rng.hpp"

namespace llcbench {

using Eigen::VectorXd;
using ConstVecRef = Eigen::Ref<const VectorXd>;

enum class Algorithm { Sgld, AdamSgld, RmsPropSgld, Sghmc, Sgnht };

std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(std::string_view name);
const std::vector<Algorithm>& all_algorithms();

struct CommonHypers {
  double epsilon = 1e-4;
  double gamma = 1.0;
  double beta_tilde = 1.0;
};

struct AdamSgldHypers {
  double a = 0.1;
  double b1 = 0.9;
  double b2 = 0.999;
};

struct RmsPropSgldHypers {
  double a = 0.1;
  double b = 0.99;
};

struct SghmcHypers {
  double alpha = 0.1;
};

struct SgnhtHypers {
  double alpha0 = 0.1;
};

/// Alternatives to the literal update rules, for sensitivity studies. Both off by default.
struct SamplerVariants {
  bool post_update_momentum = false;     // SGHMC/SGNHT: w += p_{t+1} instead of p_t
  bool squared_norm_thermostat = false;  // SGNHT: ||p||^2 / d instead of ||p|| / d
};

struct SamplerConfig {
  Algorithm algorithm = Algorithm::Sgld;
  CommonHypers common;
  AdamSgldHypers adam;
  RmsPropSgldHypers rmsprop;
  SghmcHypers sghmc;
  SgnhtHypers sgnht;
  SamplerVariants variants;

  /// Throws ConfigError when a hyperparameter is outside its admissible range.
  void validate() const;
};

struct SgldState {
  VectorXd w;
};

struct AdamSgldState {
  VectorXd w;
  VectorXd m;  // first moment, starts at 0
  VectorXd v;  // second moment, starts at 1
  std::int64_t t = 0;
};

struct RmsPropSgldState {
  VectorXd w;
  VectorXd v;
  std::int64_t t = 0;
};

struct SghmcState {
  VectorXd w;
  VectorXd p;
};

struct SgnhtState {
  VectorXd w;
  VectorXd p;
  double alpha = 0.0;
};

void sgld_step(SgldState& s, ConstVecRef anchor, ConstVecRef grad, const CommonHypers& h, ConstVecRef noise);

void adamsgld_step(AdamSgldState& s, ConstVecRef anchor, ConstVecRef grad, const CommonHypers& h,
                   const AdamSgldHypers& ah, ConstVecRef noise);

void rmspropsgld_step(RmsPropSgldState& s, ConstVecRef anchor, ConstVecRef grad, const CommonHypers& h,
                      const RmsPropSgldHypers& rh, ConstVecRef noise);

void sghmc_step(SghmcState& s, ConstVecRef anchor, ConstVecRef grad, const CommonHypers& h, const SghmcHypers& mh,
                ConstVecRef noise, bool post_update_momentum = false);

void sgnht_step(SgnhtState& s, ConstVecRef anchor, ConstVecRef grad, const CommonHypers& h, ConstVecRef noise,
                const SamplerVariants& variants = {});

using SamplerState = std::variant<SgldState, AdamSgldState, RmsPropSgldState, SghmcState, SgnhtState>;

/// Fresh state at w0. SGHMC/SGNHT draw p0 ~ Normal(0, eps I) from `stream`.
SamplerState init_state(const SamplerConfig& cfg, const VectorXd& w0, CounterStream& stream);

void step(SamplerState& state, const SamplerConfig& cfg, ConstVecRef anchor, ConstVecRef grad, ConstVecRef noise);

const VectorXd& position(const SamplerState& state);

}  // namespace llcbench
