#include "llcbench/bench/problems.hpp"

#include "llcbench/rng.hpp"

namespace llcbench::bench {

std::uint64_t problem_seed(std::uint64_t master_seed, int problem, int attempt) {
  return derive_key(derive_key(derive_key(master_seed, "problem"), static_cast<std::uint64_t>(problem)),
                    static_cast<std::uint64_t>(attempt));
}

ProblemSet generate_problems(const SweepConfig& cfg) {
  const auto& cls = find_class(cfg.model_class);
  if (cfg.num_problems < 1) throw ConfigError("num_problems must be at least 1");
  ProblemSet out;
  const int max_skips = cfg.num_problems;  // attempts = problems + skips; > 50% skipped is pathological
  for (int p = 0; p < cfg.num_problems; ++p) {
    for (int attempt = 0;; ++attempt) {
      const auto seed = problem_seed(cfg.master_seed, p, attempt);
      auto task = generate_task(cls, seed, cfg.dataset, cfg.reduce_probability);
      task.id = cfg.model_class + "-p" + std::to_string(p) + (attempt ? "a" + std::to_string(attempt) : "");
      try {
        attach_llc(task);
        out.tasks.push_back(std::move(task));
        break;
      } catch (const LlcError& e) {
        out.skipped.push_back({p, seed, e.what()});
        if (static_cast<int>(out.skipped.size()) > max_skips)
          throw ConfigError("model class " + cfg.model_class + ": more than half of generated tasks lack a ground truth");
      }
    }
  }
  return out;
}

}  // namespace llcbench::bench
