// llcbench: generate DLN tasks, run sampler sweeps, summarize, and chart.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "llcbench/bench/config.hpp"
#include "llcbench/bench/metrics.hpp"
#include "llcbench/bench/probe.hpp"
#include "llcbench/bench/problems.hpp"
#include "llcbench/bench/report.hpp"
#include "llcbench/bench/sweep.hpp"
#include "llcbench/volume.hpp"

namespace fs = std::filesystem;
using namespace llcbench;
using namespace llcbench::bench;

namespace {

// Flags mirror config keys; only flags the user set are applied on top of the file.
struct ConfigFlags {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> model_class;
  std::optional<int> num_problems;
  std::vector<std::string> algorithms;
  std::vector<double> step_sizes;
  std::optional<std::uint64_t> n;
  std::optional<std::int64_t> batch_size, steps, burn_in, l0_batch_size;
  std::optional<double> beta0, gamma, reduce_probability;
  std::optional<int> chains;
  bool large_batch_l0 = false;
  std::optional<double> adam_a, adam_b1, adam_b2, rmsprop_a, rmsprop_b, sghmc_alpha, sgnht_alpha0;
  bool post_update_momentum = false, squared_norm_thermostat = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--preset", preset_name, "named protocol (see `presets`)");
    app->add_option("--seed", seed, "master_seed");
    app->add_option("--workers", workers, "worker threads");
    app->add_option("--model-class", model_class);
    app->add_option("--num-problems", num_problems);
    app->add_option("--algorithms", algorithms)->delimiter(',');
    app->add_option("--step-sizes", step_sizes)->delimiter(',');
    app->add_option("--n", n, "dataset.n");
    app->add_option("--batch-size", batch_size);
    app->add_option("--steps", steps);
    app->add_option("--burn-in", burn_in);
    app->add_option("--beta0", beta0);
    app->add_option("--gamma", gamma);
    app->add_option("--chains", chains);
    app->add_option("--reduce-probability", reduce_probability);
    app->add_option("--l0-batch-size", l0_batch_size);
    app->add_flag("--use-large-batch-l0", large_batch_l0);
    app->add_option("--adam-a", adam_a);
    app->add_option("--adam-b1", adam_b1);
    app->add_option("--adam-b2", adam_b2);
    app->add_option("--rmsprop-a", rmsprop_a);
    app->add_option("--rmsprop-b", rmsprop_b);
    app->add_option("--sghmc-alpha", sghmc_alpha);
    app->add_option("--sgnht-alpha0", sgnht_alpha0);
    app->add_flag("--post-update-momentum", post_update_momentum);
    app->add_flag("--squared-norm-thermostat", squared_norm_thermostat);
  }

  SweepConfig resolve() const {
    SweepConfig cfg = preset_name.empty() ? preset("desk") : preset(preset_name);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot read " + config_path);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
      cfg = sweep_config_from_json(j, cfg);
    }
    json patch = json::object();
    auto set = [&](const char* key, const auto& v) {
      if (v) patch[key] = *v;
    };
    set("master_seed", seed);
    set("workers", workers);
    set("model_class", model_class);
    set("num_problems", num_problems);
    if (!algorithms.empty()) patch["algorithms"] = algorithms;
    if (!step_sizes.empty()) patch["step_sizes"] = step_sizes;
    if (n) patch["dataset"] = json{{"n", *n}};
    set("batch_size", batch_size);
    set("steps", steps);
    set("burn_in", burn_in);
    set("beta0", beta0);
    set("gamma", gamma);
    set("chains", chains);
    set("reduce_probability", reduce_probability);
    set("l0_batch_size", l0_batch_size);
    if (large_batch_l0) patch["use_large_batch_l0"] = true;
    json adam = json::object(), rms = json::object();
    if (adam_a) adam["a"] = *adam_a;
    if (adam_b1) adam["b1"] = *adam_b1;
    if (adam_b2) adam["b2"] = *adam_b2;
    if (rmsprop_a) rms["a"] = *rmsprop_a;
    if (rmsprop_b) rms["b"] = *rmsprop_b;
    if (!adam.empty()) patch["adam"] = adam;
    if (!rms.empty()) patch["rmsprop"] = rms;
    if (sghmc_alpha) patch["sghmc"] = json{{"alpha", *sghmc_alpha}};
    if (sgnht_alpha0) patch["sgnht"] = json{{"alpha0", *sgnht_alpha0}};
    json variants = json::object();
    if (post_update_momentum) variants["post_update_momentum"] = true;
    if (squared_norm_thermostat) variants["squared_norm_thermostat"] = true;
    if (!variants.empty()) patch["variants"] = variants;
    cfg = sweep_config_from_json(patch, cfg);
    cfg.validate();
    return cfg;
  }
};

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void log_skips(const ProblemSet& set) {
  for (const auto& s : set.skipped)
    std::cerr << "skipped problem " << s.problem_index << " (seed " << s.seed << "): " << s.reason << '\n';
}

void print_summary(const SweepSummary& s) {
  std::printf("%-12s %10s %6s %8s %12s %12s %8s\n", "algorithm", "epsilon", "count", "nan", "mean_rel", "std_rel",
              "order");
  auto show = [](const std::optional<double>& x) {
    char buf[32];
    if (x)
      std::snprintf(buf, sizeof buf, "%12.4g", *x);
    else
      std::snprintf(buf, sizeof buf, "%12s", "-");
    return std::string(buf);
  };
  for (const auto& g : s.groups)
    std::printf("%-12s %10.3g %6zu %8.3f %s %s %s\n", std::string(to_string(g.algorithm)).c_str(), g.epsilon, g.count,
                g.nan_fraction, show(g.mean_relative_error).c_str(), show(g.std_relative_error).c_str(),
                show(g.order_preservation).c_str());
}

json presets_json() {
  json classes = json::array();
  for (const auto& c : builtin_classes())
    classes.push_back({{"name", c.name},
                       {"layers", {c.min_layers, c.max_layers}},
                       {"width", {c.min_width, c.max_width}},
                       {"standard", c.standard}});
  json protocols = json::object();
  for (const auto& name : preset_names()) protocols[name] = to_json(preset(name));
  return {{"classes", classes}, {"presets", protocols}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark SGMCMC local learning coefficient estimators on deep linear networks"};
  app.require_subcommand(1);
  std::string out_dir = "llcbench-out";

  ConfigFlags gen_flags, run_flags, oracle_flags;

  auto* gen = app.add_subcommand("gen", "generate the task list for a class and seed");
  gen_flags.attach(gen);
  gen->add_option("--out-dir", out_dir);
  bool with_params = false;
  gen->add_flag("--with-params", with_params, "include weight matrices in tasks.json");

  auto* run = app.add_subcommand("run", "execute a sweep");
  run_flags.attach(run);
  run->add_option("--out-dir", out_dir);
  bool resume = false;
  run->add_flag("--resume", resume, "keep records already in out-dir/records.jsonl");

  auto* summarize_cmd = app.add_subcommand("summarize", "records -> summary");
  std::string records_path;
  summarize_cmd->add_option("--records", records_path)->required()->check(CLI::ExistingFile);
  summarize_cmd->add_option("--out-dir", out_dir);

  auto* report = app.add_subcommand("report", "summary + records -> charts");
  std::string report_records, report_summary;
  report->add_option("--records", report_records)->required()->check(CLI::ExistingFile);
  report->add_option("--summary", report_summary, "recomputed from records when absent")->check(CLI::ExistingFile);
  report->add_option("--out-dir", out_dir);

  auto* oracle = app.add_subcommand("oracle", "volume-scaling and loss-degree diagnostics on one task");
  oracle_flags.attach(oracle);
  std::string oracle_kind = "volume";
  int task_index = 0;
  std::int64_t samples = 1'000'000;
  double box = 1.0;
  std::vector<double> eps_grid{1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  int directions = 4;
  oracle->add_option("kind", oracle_kind, "volume | degree")->check(CLI::IsMember({"volume", "degree"}));
  oracle->add_option("--task", task_index, "problem index in the generated set");
  oracle->add_option("--samples", samples, "volume: samples per eps");
  oracle->add_option("--box", box, "volume: box radius");
  oracle->add_option("--eps", eps_grid, "volume: eps grid")->delimiter(',');
  oracle->add_option("--directions", directions, "degree: random directions");
  oracle->add_option("--out-dir", out_dir);

  auto* presets_cmd = app.add_subcommand("presets", "list model classes and protocols");

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out(out_dir);
    if (gen->parsed()) {
      const auto cfg = gen_flags.resolve();
      const auto set = generate_problems(cfg);
      log_skips(set);
      json tasks = json::array();
      for (const auto& t : set.tasks) tasks.push_back(task_to_json(t, with_params));
      write_json(out / "tasks.json", {{"config", to_json(cfg)}, {"tasks", tasks}});
      for (const auto& t : set.tasks)
        std::printf("%-16s %-28s d=%-7ld r=%-4ld llc=%s\n", t.id.c_str(), t.architecture.to_string().c_str(),
                    static_cast<long>(t.parameter_count()), static_cast<long>(t.true_rank),
                    to_string(t.true_llc->lambda).c_str());
    } else if (run->parsed()) {
      const auto cfg = run_flags.resolve();
      const auto set = generate_problems(cfg);
      log_skips(set);
      fs::create_directories(out);
      write_json(out / "config.json", to_json(cfg));
      const std::size_t total = set.tasks.size() * cfg.algorithms.size() * cfg.step_sizes.size();
      std::size_t finished = 0;
      SweepOptions options;
      options.records_path = out / "records.jsonl";
      options.resume = resume;
      options.on_record = [&](const ExperimentRecord& r) {
        ++finished;
        if (r.failed) std::cerr << "record " << r.task_id << " " << to_string(r.algorithm) << " failed: " << r.error << '\n';
        if (finished % 50 == 0) std::cerr << "  " << finished << " new records\r" << std::flush;
      };
      const auto records = run_sweep(cfg, set.tasks, options);
      std::cerr << records.size() << "/" << total << " records\n";
      const auto summary = summarize(records);
      emit_charts(summary, out);
      print_summary(summary);
    } else if (summarize_cmd->parsed()) {
      const auto file = read_records(records_path);
      const auto summary = summarize(file.records);
      write_json(out / "summary.json", summary_to_json(summary));
      print_summary(summary);
    } else if (report->parsed()) {
      const auto file = read_records(report_records);
      SweepSummary summary;
      if (report_summary.empty()) {
        summary = summarize(file.records);
      } else {
        std::ifstream in(report_summary);
        if (!in) throw IoError("cannot read " + report_summary);
        summary = summary_from_json(json::parse(in));
      }
      const auto files = emit_report(summary, file.header, file.records, out);
      for (const auto& c : files.charts) std::cout << c.string() << '\n';
    } else if (oracle->parsed()) {
      auto cfg = oracle_flags.resolve();
      cfg.num_problems = std::max(cfg.num_problems, task_index + 1);
      const auto set = generate_problems(cfg);
      const auto& task = set.tasks.at(static_cast<std::size_t>(task_index));
      json result{{"task", task_to_json(task, false)}};
      if (oracle_kind == "volume") {
        VolumeOptions opts;
        opts.eps_grid = eps_grid;
        opts.samples_per_eps = samples;
        opts.box_radius = box;
        opts.seed = cfg.master_seed;
        opts.workers = cfg.workers;
        const auto v = mc_volume_exponent(task, opts);
        result["slope"] = v.slope;
        result["true_llc"] = task.true_llc->value();
        result["eps"] = v.eps;
        result["volume"] = v.volume;
        result["hits"] = v.hits;
      } else {
        DegreeProbeOptions opts;
        opts.directions = directions;
        opts.seed = cfg.master_seed;
        const auto d = degree_probe(task, opts);
        result["expected_degree"] = d.expected_degree;
        result["slopes"] = d.slopes;
      }
      std::cout << result.dump(2) << '\n';
    } else if (presets_cmd->parsed()) {
      std::cout << presets_json().dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
