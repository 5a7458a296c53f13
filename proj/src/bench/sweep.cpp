#include "llcbench/bench/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "llcbench/estimator.hpp"
#include "llcbench/rng.hpp"

namespace llcbench::bench {

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <typename T>
json optional_json(const std::optional<T>& x) {
  if (!x) return nullptr;
  if constexpr (std::is_floating_point_v<T>) return number_or_null(*x);
  return *x;
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

int algorithm_index(Algorithm a) {
  const auto& all = all_algorithms();
  return static_cast<int>(std::find(all.begin(), all.end(), a) - all.begin());
}

}  // namespace

std::tuple<int, int, int> ExperimentRecord::key() const {
  return {task_index, algorithm_index(algorithm), step_index};
}

json record_to_json(const ExperimentRecord& r) {
  return json{
      {"task_index", r.task_index},
      {"task_id", r.task_id},
      {"layers", r.layers},
      {"sizes", r.sizes},
      {"d", r.parameter_count},
      {"r", r.true_rank},
      {"true_llc", r.true_llc},
      {"true_llc_value", r.true_llc_value},
      {"algorithm", std::string(to_string(r.algorithm))},
      {"step_index", r.step_index},
      {"epsilon", r.epsilon},
      {"seed", r.seed},
      {"lambda_hat", number_or_null(r.lambda_hat)},
      {"diverged", r.diverged},
      {"diverged_fraction", r.diverged_fraction},
      {"divergence_step", optional_json(r.divergence_step)},
      {"relative_error", optional_json(r.relative_error)},
      {"absolute_error", optional_json(r.absolute_error)},
      {"trace_min", optional_json(r.trace_min)},
      {"trace_max", optional_json(r.trace_max)},
      {"trace_final", optional_json(r.trace_final)},
      {"failed", r.failed},
      {"error", r.error},
      {"wall_time_s", r.wall_time_s},
  };
}

ExperimentRecord record_from_json(const json& j) {
  ExperimentRecord r;
  r.task_index = j.at("task_index").get<int>();
  r.task_id = j.at("task_id").get<std::string>();
  r.layers = j.at("layers").get<int>();
  r.sizes = j.at("sizes").get<std::vector<Eigen::Index>>();
  r.parameter_count = j.at("d").get<Eigen::Index>();
  r.true_rank = j.at("r").get<Eigen::Index>();
  r.true_llc = j.at("true_llc").get<std::string>();
  r.true_llc_value = j.at("true_llc_value").get<double>();
  r.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  r.step_index = j.at("step_index").get<int>();
  r.epsilon = j.at("epsilon").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.lambda_hat = optional_from<double>(j, "lambda_hat").value_or(std::numeric_limits<double>::quiet_NaN());
  r.diverged = j.at("diverged").get<bool>();
  r.diverged_fraction = j.value("diverged_fraction", 0.0);
  r.divergence_step = optional_from<std::int64_t>(j, "divergence_step");
  r.relative_error = optional_from<double>(j, "relative_error");
  r.absolute_error = optional_from<double>(j, "absolute_error");
  r.trace_min = optional_from<double>(j, "trace_min");
  r.trace_max = optional_from<double>(j, "trace_max");
  r.trace_final = optional_from<double>(j, "trace_final");
  r.failed = j.value("failed", false);
  r.error = j.value("error", std::string{});
  r.wall_time_s = j.value("wall_time_s", 0.0);
  return r;
}

std::string canonical_payload(const ExperimentRecord& r) {
  auto j = record_to_json(r);
  j.erase("wall_time_s");
  return j.dump();
}

std::uint64_t records_digest(std::vector<ExperimentRecord> records) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& r : records) {
    for (unsigned char c : canonical_payload(r) + "\n") {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
  }
  return h;
}

std::uint64_t record_seed(std::uint64_t master_seed, int task_index, Algorithm algo, int step_index) {
  auto k = derive_key(master_seed, "record");
  k = derive_key(k, static_cast<std::uint64_t>(task_index));
  k = derive_key(k, to_string(algo));
  return derive_key(k, static_cast<std::uint64_t>(step_index));
}

ExperimentRecord run_experiment(const SweepConfig& cfg, const TaskSpec& task, int task_index, Algorithm algo,
                                int step_index) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  rec.task_index = task_index;
  rec.task_id = task.id;
  rec.layers = task.architecture.layers();
  rec.sizes = task.architecture.sizes();
  rec.parameter_count = task.parameter_count();
  rec.true_rank = task.true_rank;
  if (task.true_llc) {
    rec.true_llc = to_string(task.true_llc->lambda);
    rec.true_llc_value = task.true_llc->value();
  }
  rec.algorithm = algo;
  rec.step_index = step_index;
  rec.epsilon = cfg.step_sizes.at(static_cast<std::size_t>(step_index));
  rec.seed = record_seed(cfg.master_seed, task_index, algo, step_index);
  rec.lambda_hat = std::numeric_limits<double>::quiet_NaN();

  try {
    if (!task.true_llc) throw ContractError("task " + task.id + " has no ground-truth LLC");
    const Dataset data(task.dataset);
    EstimatorConfig est{task.dataset.n, cfg.beta0, cfg.effective_burn_in(), cfg.use_large_batch_l0};
    SamplerConfig sampler{algo, {rec.epsilon, cfg.gamma, est.beta_tilde()}, cfg.adam, cfg.rmsprop, cfg.sghmc,
                          cfg.sgnht, cfg.variants};
    const ChainConfig chain{cfg.steps, cfg.batch_size, cfg.l0_batch_size};

    std::vector<LlcEstimate> estimates;
    for (int c = 0; c < cfg.chains; ++c) {
      const auto trace = run_chain(data, sampler, chain, derive_key(rec.seed, static_cast<std::uint64_t>(c)));
      estimates.push_back(estimate_llc(trace, cfg.steps, est));
      if (c == 0) {
        rec.divergence_step = trace.divergence_step;
        if (!trace.losses.empty()) {
          const auto [lo, hi] = std::minmax_element(trace.losses.begin(), trace.losses.end());
          rec.trace_min = *lo;
          rec.trace_max = *hi;
          rec.trace_final = trace.losses.back();
        }
      }
    }
    const auto combined = multi_chain_estimate(estimates);
    rec.lambda_hat = combined.estimate.lambda_hat;
    rec.diverged = combined.estimate.diverged;
    rec.diverged_fraction = combined.diverged_fraction;
    if (!rec.diverged) {
      if (rec.true_llc_value > kRelativeErrorFloor)
        rec.relative_error = (rec.lambda_hat - rec.true_llc_value) / rec.true_llc_value;
      else
        rec.absolute_error = rec.lambda_hat - rec.true_llc_value;
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
    rec.lambda_hat = std::numeric_limits<double>::quiet_NaN();
  }
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

RecordsFile read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records file " + path.string());
  RecordsFile out;
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  if (lines.empty()) throw IoError("records file " + path.string() + " is empty");
  try {
    out.header = json::parse(lines.front());
  } catch (const json::exception&) {
    throw IoError("records file " + path.string() + " has no header");
  }
  if (out.header.value("schema", std::string{}) != kRecordSchema)
    throw IoError("records file " + path.string() + " has the wrong schema");
  if (out.header.value("version", 0) != kRecordSchemaVersion)
    throw IoError("records file " + path.string() + " has unsupported schema version");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    try {
      out.records.push_back(record_from_json(json::parse(lines[i])));
    } catch (const std::exception& e) {
      if (i + 1 == lines.size()) break;  // torn final append
      throw IoError("records file " + path.string() + ": bad line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg, const std::vector<TaskSpec>& tasks,
                                        const SweepOptions& options) {
  cfg.validate();
  json header{{"schema", kRecordSchema}, {"version", kRecordSchemaVersion}, {"config", content_key(cfg)}};
  json ids = json::array();
  for (const auto& t : tasks) ids.push_back(t.id);
  header["tasks"] = ids;

  std::map<std::tuple<int, int, int>, ExperimentRecord> done;
  std::ofstream out;
  if (!options.records_path.empty()) {
    bool append = false;
    if (options.resume && std::filesystem::exists(options.records_path)) {
      auto existing = read_records(options.records_path);
      if (existing.header.at("config") != header.at("config") || existing.header.at("tasks") != header.at("tasks"))
        throw ConfigError("cannot resume: " + options.records_path.string() + " was written by a different config");
      for (auto& r : existing.records)
        if (!r.failed) done.emplace(r.key(), std::move(r));
      append = true;
    }
    if (options.records_path.has_parent_path()) std::filesystem::create_directories(options.records_path.parent_path());
    out.open(options.records_path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw IoError("cannot write records file " + options.records_path.string());
    if (!append) out << header.dump() << '\n' << std::flush;
  }

  struct Job {
    int task;
    Algorithm algo;
    int step;
  };
  std::vector<Job> jobs;
  for (int t = 0; t < static_cast<int>(tasks.size()); ++t)
    for (auto algo : cfg.algorithms)
      for (int e = 0; e < static_cast<int>(cfg.step_sizes.size()); ++e)
        if (!done.count({t, algorithm_index(algo), e})) jobs.push_back({t, algo, e});

  std::vector<ExperimentRecord> fresh(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex writer;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      fresh[i] = run_experiment(cfg, tasks[static_cast<std::size_t>(job.task)], job.task, job.algo, job.step);
      std::lock_guard lock(writer);
      if (out.is_open()) out << record_to_json(fresh[i]).dump() << '\n' << std::flush;
      if (options.on_record) options.on_record(fresh[i]);
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, cfg.workers));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (auto& r : fresh) done.insert_or_assign(r.key(), std::move(r));
  std::vector<ExperimentRecord> all;
  all.reserve(done.size());
  for (auto& [_, r] : done) all.push_back(std::move(r));
  return all;
}

}  // namespace llcbench::bench
