#include "llcbench/samplers.hpp"

#include <cmath>

#include "llcbench/errors.hpp"

namespace llcbench {

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::Sgld: return "SGLD";
    case Algorithm::AdamSgld: return "AdamSGLD";
    case Algorithm::RmsPropSgld: return "RMSPropSGLD";
    case Algorithm::Sghmc: return "SGHMC";
    case Algorithm::Sgnht: return "SGNHT";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : all_algorithms())
    if (to_string(a) == name) return a;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> algos{Algorithm::Sgld, Algorithm::AdamSgld, Algorithm::RmsPropSgld,
                                            Algorithm::Sghmc, Algorithm::Sgnht};
  return algos;
}

void SamplerConfig::validate() const {
  auto in_unit = [](double b) { return b > 0.0 && b < 1.0; };
  if (!(common.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(common.gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
  if (!(common.beta_tilde >= 0.0)) throw ConfigError("beta_tilde must be nonnegative");
  switch (algorithm) {
    case Algorithm::Sgld: break;
    case Algorithm::AdamSgld:
      if (!(adam.a > 0.0) || !in_unit(adam.b1) || !in_unit(adam.b2))
        throw ConfigError("AdamSGLD needs a > 0 and b1, b2 in (0, 1)");
      break;
    case Algorithm::RmsPropSgld:
      if (!(rmsprop.a > 0.0) || !in_unit(rmsprop.b)) throw ConfigError("RMSPropSGLD needs a > 0 and b in (0, 1)");
      break;
    case Algorithm::Sghmc:
      if (!(sghmc.alpha > 0.0)) throw ConfigError("SGHMC friction must be positive");
      break;
    case Algorithm::Sgnht:
      if (!(sgnht.alpha0 > 0.0)) throw ConfigError("SGNHT initial friction must be positive");
      break;
  }
}

void sgld_step(SgldState& s, ConstVecRef anchor, ConstVecRef grad, const CommonHypers& h, ConstVecRef noise) {
  s.w.array() += -0.5 * h.epsilon * (h.gamma * (s.w - anchor).array() + h.beta_tilde * grad.array()) +
                 std::sqrt(h.epsilon) * noise.array();
}

void adamsgld_step(AdamSgldState& s, ConstVecRef anchor, ConstVecRef grad, const CommonHypers& h,
                   const AdamSgldHypers& ah, ConstVecRef noise) {
  s.m = ah.b1 * s.m + (1.0 - ah.b1) * grad;
  s.v.array() = ah.b2 * s.v.array() + (1.0 - ah.b2) * grad.array().square();
  const auto k = static_cast<double>(s.t + 1);
  const double m_scale = 1.0 / (1.0 - std::pow(ah.b1, k));
  const double v_scale = 1.0 / (1.0 - std::pow(ah.b2, k));
  const Eigen::ArrayXd step = h.epsilon / ((v_scale * s.v.array()).sqrt() + ah.a);
  s.w.array() += -0.5 * step * (h.gamma * (s.w - anchor).array() + h.beta_tilde * m_scale * s.m.array()) +
                 step.sqrt() * noise.array();
  ++s.t;
}

void rmspropsgld_step(RmsPropSgldState& s, ConstVecRef anchor, ConstVecRef grad, const CommonHypers& h,
                      const RmsPropSgldHypers& rh, ConstVecRef noise) {
  s.v.array() = rh.b * s.v.array() + (1.0 - rh.b) * grad.array().square();
  const double v_scale = 1.0 / (1.0 - std::pow(rh.b, static_cast<double>(s.t + 1)));
  const Eigen::ArrayXd step = h.epsilon / ((v_scale * s.v.array()).sqrt() + rh.a);
  s.w.array() += -0.5 * step * (h.gamma * (s.w - anchor).array() + h.beta_tilde * grad.array()) +
                 step.sqrt() * noise.array();
  ++s.t;
}

void sghmc_step(SghmcState& s, ConstVecRef anchor, ConstVecRef grad, const CommonHypers& h, const SghmcHypers& mh,
                ConstVecRef noise, bool post_update_momentum) {
  const VectorXd dp = -0.5 * h.epsilon * (h.gamma * (s.w - anchor) + h.beta_tilde * grad) - mh.alpha * s.p +
                      std::sqrt(2.0 * mh.alpha * h.epsilon) * noise;
  if (post_update_momentum) {
    s.p += dp;
    s.w += s.p;
  } else {
    s.w += s.p;
    s.p += dp;
  }
}

void sgnht_step(SgnhtState& s, ConstVecRef anchor, ConstVecRef grad, const CommonHypers& h, ConstVecRef noise,
                const SamplerVariants& variants) {
  const VectorXd dp = -0.5 * h.epsilon * (h.gamma * (s.w - anchor) + h.beta_tilde * grad) - s.alpha * s.p +
                      std::sqrt(2.0 * s.alpha * h.epsilon) * noise;
  const auto d = static_cast<double>(s.p.size());
  const double kinetic = variants.squared_norm_thermostat ? s.p.squaredNorm() : s.p.norm();
  const double next_alpha = s.alpha + kinetic / d - h.epsilon;
  if (variants.post_update_momentum) {
    s.p += dp;
    s.w += s.p;
  } else {
    s.w += s.p;
    s.p += dp;
  }
  s.alpha = next_alpha;
}

SamplerState init_state(const SamplerConfig& cfg, const VectorXd& w0, CounterStream& stream) {
  const auto d = w0.size();
  auto momentum = [&] {
    VectorXd p(d);
    stream.fill_normal(p);
    return VectorXd(std::sqrt(cfg.common.epsilon) * p);
  };
  switch (cfg.algorithm) {
    case Algorithm::Sgld: return SgldState{w0};
    case Algorithm::AdamSgld: return AdamSgldState{w0, VectorXd::Zero(d), VectorXd::Ones(d), 0};
    case Algorithm::RmsPropSgld: return RmsPropSgldState{w0, VectorXd::Ones(d), 0};
    case Algorithm::Sghmc: return SghmcState{w0, momentum()};
    case Algorithm::Sgnht: return SgnhtState{w0, momentum(), cfg.sgnht.alpha0};
  }
  throw ContractError("init_state: unknown algorithm");
}

void step(SamplerState& state, const SamplerConfig& cfg, ConstVecRef anchor, ConstVecRef grad, ConstVecRef noise) {
  std::visit(
      [&](auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, SgldState>)
          sgld_step(s, anchor, grad, cfg.common, noise);
        else if constexpr (std::is_same_v<S, AdamSgldState>)
          adamsgld_step(s, anchor, grad, cfg.common, cfg.adam, noise);
        else if constexpr (std::is_same_v<S, RmsPropSgldState>)
          rmspropsgld_step(s, anchor, grad, cfg.common, cfg.rmsprop, noise);
        else if constexpr (std::is_same_v<S, SghmcState>)
          sghmc_step(s, anchor, grad, cfg.common, cfg.sghmc, noise, cfg.variants.post_update_momentum);
        else
          sgnht_step(s, anchor, grad, cfg.common, noise, cfg.variants);
      },
      state);
}

const VectorXd& position(const SamplerState& state) {
  return std::visit([](const auto& s) -> const VectorXd& { return s.w; }, state);
}

}  // namespace llcbench
