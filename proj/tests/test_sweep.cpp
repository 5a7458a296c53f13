#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "llcbench/bench/sweep.hpp"

using namespace llcbench;
using namespace llcbench::bench;
namespace fs = std::filesystem;

namespace {

SweepConfig small_config() {
  auto cfg = preset("desk");
  cfg.num_problems = 3;
  cfg.algorithms = {Algorithm::Sgld, Algorithm::RmsPropSgld};
  cfg.step_sizes = {1e-6, 1e-5, 1e3};
  cfg.dataset.n = 2000;
  cfg.batch_size = 50;
  cfg.steps = 60;
  cfg.burn_in = 50;
  cfg.master_seed = 17;
  return cfg;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("llcbench-test-sweep-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_CASE("one task, one algorithm, three step sizes gives three records") {
  auto cfg = small_config();
  cfg.num_problems = 1;
  cfg.algorithms = {Algorithm::Sgld};
  const auto problems = generate_problems(cfg);
  const auto records = run_sweep(cfg, problems.tasks);
  REQUIRE(records.size() == 3);
  for (int e = 0; e < 3; ++e) {
    CHECK(records[e].step_index == e);
    CHECK(records[e].epsilon == cfg.step_sizes[e]);
    CHECK_FALSE(records[e].failed);
  }
}

TEST_CASE("a huge step size diverges without failing the sweep") {
  auto cfg = small_config();
  cfg.num_problems = 1;
  const auto records = run_sweep(cfg, generate_problems(cfg).tasks);
  for (const auto& r : records) {
    if (r.step_index != 2 || r.algorithm != Algorithm::Sgld) continue;
    CHECK(r.diverged);
    CHECK(std::isnan(r.lambda_hat));
    CHECK_FALSE(r.relative_error);
    CHECK_FALSE(r.failed);
  }
}

TEST_CASE("results do not depend on worker count") {
  auto cfg = small_config();
  const auto tasks = generate_problems(cfg).tasks;
  const auto serial = run_sweep(cfg, tasks);
  cfg.workers = 4;
  const auto parallel = run_sweep(cfg, tasks);
  REQUIRE(serial.size() == 3 * 2 * 3);
  CHECK(records_digest(serial) == records_digest(parallel));
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(canonical_payload(serial[i]) == canonical_payload(parallel[i]));
}

TEST_CASE("record seeds separate every cell") {
  CHECK(record_seed(1, 0, Algorithm::Sgld, 0) != record_seed(1, 0, Algorithm::Sgld, 1));
  CHECK(record_seed(1, 0, Algorithm::Sgld, 0) != record_seed(1, 0, Algorithm::Sghmc, 0));
  CHECK(record_seed(1, 0, Algorithm::Sgld, 0) != record_seed(1, 1, Algorithm::Sgld, 0));
  CHECK(record_seed(1, 0, Algorithm::Sgld, 0) != record_seed(2, 0, Algorithm::Sgld, 0));
}

TEST_CASE("records JSON") {
  auto cfg = small_config();
  cfg.num_problems = 1;
  const auto records = run_sweep(cfg, generate_problems(cfg).tasks);
  for (const auto& r : records) {
    const auto j = record_to_json(r);
    if (r.diverged) CHECK(j.at("lambda_hat").is_null());
    const auto back = record_from_json(j);
    CHECK(canonical_payload(back) == canonical_payload(r));
    CHECK(std::isnan(back.lambda_hat) == std::isnan(r.lambda_hat));
  }
}

TEST_CASE("records persist incrementally and resume") {
  const auto dir = scratch("resume");
  const auto path = dir / "records.jsonl";
  auto cfg = small_config();
  const auto tasks = generate_problems(cfg).tasks;

  SweepOptions opts;
  opts.records_path = path;
  std::size_t seen = 0;
  opts.on_record = [&](const ExperimentRecord&) { ++seen; };
  const auto full = run_sweep(cfg, tasks, opts);
  CHECK(seen == full.size());
  CHECK(line_count(path) == full.size() + 1);

  // keep the header and 5 records, then tear the last line
  std::vector<std::string> lines;
  {
    std::ifstream in(path);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
  }
  {
    std::ofstream out(path, std::ios::trunc);
    for (int i = 0; i < 6; ++i) out << lines[i] << '\n';
    out << lines[6].substr(0, lines[6].size() / 2);
  }
  const auto partial = read_records(path);
  CHECK(partial.records.size() == 5);

  // a torn line followed by more data is corruption, not truncation
  {
    std::ofstream out(dir / "bad.jsonl", std::ios::trunc);
    out << lines[0] << "\n{not json\n" << lines[1] << '\n';
  }
  CHECK_THROWS_AS(read_records(dir / "bad.jsonl"), IoError);

  {
    std::ofstream out(path, std::ios::trunc);
    for (int i = 0; i < 6; ++i) out << lines[i] << '\n';
  }
  opts.resume = true;
  seen = 0;
  const auto resumed = run_sweep(cfg, tasks, opts);
  CHECK(seen == full.size() - 5);
  CHECK(records_digest(resumed) == records_digest(full));

  auto changed = cfg;
  changed.gamma = 3.0;
  CHECK_THROWS_AS(run_sweep(changed, tasks, opts), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("records file errors") {
  const auto dir = scratch("errors");
  CHECK_THROWS_AS(read_records(dir / "missing.jsonl"), IoError);
  {
    std::ofstream out(dir / "wrong.jsonl");
    out << R"({"schema":"something-else","version":1})" << '\n';
  }
  CHECK_THROWS_AS(read_records(dir / "wrong.jsonl"), IoError);
  { std::ofstream out(dir / "empty.jsonl"); }
  CHECK_THROWS_AS(read_records(dir / "empty.jsonl"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("a task without ground truth fails its record only") {
  auto cfg = small_config();
  cfg.num_problems = 2;
  auto tasks = generate_problems(cfg).tasks;
  tasks[1].true_llc.reset();
  const auto records = run_sweep(cfg, tasks);
  for (const auto& r : records) {
    CHECK(r.failed == (r.task_index == 1));
    if (r.failed) CHECK(r.error.find("ground-truth") != std::string::npos);
  }
}
