#include "llcbench/bench/config.hpp"

#include <algorithm>
#include <cmath>

#include "llcbench/errors.hpp"

namespace llcbench::bench {

std::int64_t SweepConfig::effective_burn_in() const {
  return burn_in.value_or(static_cast<std::int64_t>(std::floor(0.9 * static_cast<double>(steps))));
}

void SweepConfig::validate() const {
  llcbench::validate(find_class(model_class));
  if (num_problems < 1) throw ConfigError("num_problems must be at least 1");
  if (algorithms.empty()) throw ConfigError("algorithms must be nonempty");
  if (step_sizes.empty()) throw ConfigError("step_sizes must be nonempty");
  for (double e : step_sizes)
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("step sizes must be positive and finite");
  if (dataset.n < 3) throw ConfigError("dataset.n must be at least 3");
  if (!(dataset.input_low < dataset.input_high)) throw ConfigError("dataset input bounds are inverted");
  if (!(dataset.noise_variance >= 0.0)) throw ConfigError("dataset.noise_variance must be nonnegative");
  if (batch_size < 1 || static_cast<std::uint64_t>(batch_size) > dataset.n)
    throw ConfigError("batch_size must be in [1, n]");
  if (steps < 2) throw ConfigError("steps must be at least 2");
  const auto b = effective_burn_in();
  if (b < 0 || b >= steps) throw ConfigError("burn_in must satisfy 0 <= B < steps");
  if (!(beta0 > 0.0)) throw ConfigError("beta0 must be positive");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
  if (chains < 1) throw ConfigError("chains must be at least 1");
  if (!(reduce_probability >= 0.0 && reduce_probability <= 1.0))
    throw ConfigError("reduce_probability must be in [0, 1]");
  if (l0_batch_size < 0) throw ConfigError("l0_batch_size must be nonnegative");
  if (use_large_batch_l0 && l0_batch_size == 0) throw ConfigError("use_large_batch_l0 needs l0_batch_size > 0");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  for (auto algo : algorithms) {
    SamplerConfig sc{algo, {step_sizes.front(), gamma, 1.0}, adam, rmsprop, sghmc, sgnht, variants};
    sc.validate();
  }
}

std::vector<double> log_space(double low, double high, int count) {
  if (count < 1 || !(low > 0.0) || !(high >= low)) throw ConfigError("log_space: invalid range");
  if (count == 1) return {low};
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log10(low), b = std::log10(high);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
  out.front() = low;
  out.back() = high;
  return out;
}

std::vector<std::string> preset_names() { return {"desk", "full-100K", "full-1M", "full-10M", "full-100M"}; }

SweepConfig preset(const std::string& name) {
  SweepConfig cfg;
  cfg.step_sizes = log_space(1e-6, 1e-2, 8);
  if (name == "desk") {
    cfg.model_class = "1K";
    cfg.num_problems = 30;
    cfg.dataset = {10000, -10.0, 10.0, 0.25};
    cfg.batch_size = 100;
    cfg.steps = 2000;
    cfg.burn_in = 1800;
    return cfg;
  }
  const std::string prefix = "full-";
  if (name.rfind(prefix, 0) == 0) {
    cfg.model_class = name.substr(prefix.size());
    find_class(cfg.model_class);
    cfg.num_problems = 100;
    cfg.dataset = {1000000, -10.0, 10.0, 0.25};
    cfg.batch_size = 500;
    cfg.steps = 50000;
    cfg.burn_in = std::nullopt;  // 0.9 T
    cfg.gamma = 1.0;
    return cfg;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

json to_json(const SweepConfig& cfg) {
  json algos = json::array();
  for (auto a : cfg.algorithms) algos.push_back(std::string(to_string(a)));
  json j{
      {"model_class", cfg.model_class},
      {"num_problems", cfg.num_problems},
      {"algorithms", algos},
      {"step_sizes", cfg.step_sizes},
      {"dataset",
       {{"n", cfg.dataset.n},
        {"input_low", cfg.dataset.input_low},
        {"input_high", cfg.dataset.input_high},
        {"noise_variance", cfg.dataset.noise_variance}}},
      {"batch_size", cfg.batch_size},
      {"steps", cfg.steps},
      {"burn_in", cfg.burn_in ? json(*cfg.burn_in) : json(nullptr)},
      {"beta0", cfg.beta0},
      {"gamma", cfg.gamma},
      {"chains", cfg.chains},
      {"reduce_probability", cfg.reduce_probability},
      {"l0_batch_size", cfg.l0_batch_size},
      {"use_large_batch_l0", cfg.use_large_batch_l0},
      {"adam", {{"a", cfg.adam.a}, {"b1", cfg.adam.b1}, {"b2", cfg.adam.b2}}},
      {"rmsprop", {{"a", cfg.rmsprop.a}, {"b", cfg.rmsprop.b}}},
      {"sghmc", {{"alpha", cfg.sghmc.alpha}}},
      {"sgnht", {{"alpha0", cfg.sgnht.alpha0}}},
      {"variants",
       {{"post_update_momentum", cfg.variants.post_update_momentum},
        {"squared_norm_thermostat", cfg.variants.squared_norm_thermostat}}},
      {"master_seed", cfg.master_seed},
      {"workers", cfg.workers},
  };
  return j;
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

SweepConfig sweep_config_from_json(const json& j, SweepConfig cfg) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    if (j.contains("preset")) cfg = preset(j.at("preset").get<std::string>());
    static const std::vector<std::string> known{
        "preset",     "model_class", "num_problems", "algorithms", "step_sizes",         "dataset",
        "batch_size", "steps",       "burn_in",      "beta0",      "gamma",              "chains",
        "reduce_probability", "l0_batch_size", "use_large_batch_l0", "adam", "rmsprop", "sghmc",
        "sgnht",      "variants",    "master_seed",  "workers"};
    for (const auto& [key, _] : j.items())
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError("unknown config key '" + key + "'");

    read(j, "model_class", cfg.model_class);
    read(j, "num_problems", cfg.num_problems);
    if (j.contains("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
    read(j, "step_sizes", cfg.step_sizes);
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      read(d, "n", cfg.dataset.n);
      read(d, "input_low", cfg.dataset.input_low);
      read(d, "input_high", cfg.dataset.input_high);
      read(d, "noise_variance", cfg.dataset.noise_variance);
    }
    read(j, "batch_size", cfg.batch_size);
    read(j, "steps", cfg.steps);
    if (j.contains("burn_in"))
      cfg.burn_in = j.at("burn_in").is_null() ? std::nullopt : std::optional(j.at("burn_in").get<std::int64_t>());
    read(j, "beta0", cfg.beta0);
    read(j, "gamma", cfg.gamma);
    read(j, "chains", cfg.chains);
    read(j, "reduce_probability", cfg.reduce_probability);
    read(j, "l0_batch_size", cfg.l0_batch_size);
    read(j, "use_large_batch_l0", cfg.use_large_batch_l0);
    if (j.contains("adam")) {
      read(j.at("adam"), "a", cfg.adam.a);
      read(j.at("adam"), "b1", cfg.adam.b1);
      read(j.at("adam"), "b2", cfg.adam.b2);
    }
    if (j.contains("rmsprop")) {
      read(j.at("rmsprop"), "a", cfg.rmsprop.a);
      read(j.at("rmsprop"), "b", cfg.rmsprop.b);
    }
    if (j.contains("sghmc")) read(j.at("sghmc"), "alpha", cfg.sghmc.alpha);
    if (j.contains("sgnht")) read(j.at("sgnht"), "alpha0", cfg.sgnht.alpha0);
    if (j.contains("variants")) {
      read(j.at("variants"), "post_update_momentum", cfg.variants.post_update_momentum);
      read(j.at("variants"), "squared_norm_thermostat", cfg.variants.squared_norm_thermostat);
    }
    read(j, "master_seed", cfg.master_seed);
    read(j, "workers", cfg.workers);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

json content_key(const SweepConfig& cfg) {
  auto j = to_json(cfg);
  j.erase("workers");
  return j;
}

json task_to_json(const TaskSpec& task, bool include_params) {
  json j{
      {"id", task.id},
      {"model_class", task.model_class},
      {"seed", task.seed},
      {"sizes", task.architecture.sizes()},
      {"parameter_count", task.parameter_count()},
      {"true_rank", task.true_rank},
      {"dataset",
       {{"n", task.dataset.n},
        {"input_low", task.dataset.input_low},
        {"input_high", task.dataset.input_high},
        {"noise_variance", task.dataset.noise_variance},
        {"seed", task.dataset.seed}}},
  };
  if (task.true_llc) {
    j["true_llc"] = to_string(task.true_llc->lambda);
    j["true_llc_value"] = task.true_llc->value();
    j["sigma"] = task.true_llc->decomposition.sigma;
  }
  if (include_params) {
    json layers = json::array();
    for (int l = 0; l < task.true_params.layers(); ++l) {
      const auto w = task.true_params.layer(l);
      json rows = json::array();
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(w.cols()));
        for (Eigen::Index k = 0; k < w.cols(); ++k) row[static_cast<std::size_t>(k)] = w(i, k);
        rows.push_back(row);
      }
      layers.push_back(rows);
    }
    j["true_params"] = layers;
  }
  return j;
}

TaskSpec task_from_json(const json& j) {
  try {
    const auto sizes = j.at("sizes").get<std::vector<Eigen::Index>>();
    DlnArchitecture arch(sizes);
    Params params(arch);
    if (j.contains("true_params")) {
      const auto& layers = j.at("true_params");
      if (static_cast<int>(layers.size()) != arch.layers()) throw ConfigError("task: layer count mismatch");
      for (int l = 0; l < arch.layers(); ++l) {
        auto w = params.layer(l);
        const auto& rows = layers.at(static_cast<std::size_t>(l));
        if (static_cast<Eigen::Index>(rows.size()) != w.rows()) throw ConfigError("task: layer shape mismatch");
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          const auto row = rows.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
          if (static_cast<Eigen::Index>(row.size()) != w.cols()) throw ConfigError("task: layer shape mismatch");
          for (Eigen::Index k = 0; k < w.cols(); ++k) w(i, k) = row[static_cast<std::size_t>(k)];
        }
      }
    } else {
      // regenerate from the seed with the default rank-reduction probability
      params = sample_true_params(arch, j.at("seed").get<std::uint64_t>());
    }
    const auto& d = j.at("dataset");
    DatasetSettings data{d.at("n").get<std::uint64_t>(), d.at("input_low").get<double>(),
                         d.at("input_high").get<double>(), d.at("noise_variance").get<double>()};
    auto task = make_task(j.at("id").get<std::string>(), params, d.at("seed").get<std::uint64_t>(), data);
    task.model_class = j.value("model_class", std::string{});
    task.seed = j.value("seed", std::uint64_t{0});
    return task;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("task: ") + e.what());
  }
}

}  // namespace llcbench::bench
