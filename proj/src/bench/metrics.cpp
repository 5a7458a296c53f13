#include "llcbench/bench/metrics.hpp"

#include <cmath>
#include <map>

namespace llcbench::bench {

std::optional<OrderPreservation> order_preservation_rate(std::span<const double> true_llc,
                                                         std::span<const double> estimates) {
  if (true_llc.size() != estimates.size()) throw ContractError("order_preservation_rate: length mismatch");
  std::size_t eligible = 0, agree = 0;
  for (std::size_t i = 0; i < true_llc.size(); ++i) {
    if (!std::isfinite(estimates[i])) continue;
    for (std::size_t j = i + 1; j < true_llc.size(); ++j) {
      if (!std::isfinite(estimates[j]) || true_llc[i] == true_llc[j]) continue;
      ++eligible;
      const bool truth = true_llc[i] < true_llc[j];
      if (truth ? estimates[i] < estimates[j] : estimates[j] < estimates[i]) ++agree;
    }
  }
  if (eligible == 0) return std::nullopt;
  return OrderPreservation{static_cast<double>(agree) / static_cast<double>(eligible), eligible};
}

std::optional<OrderPreservation> order_preservation_rate(std::span<const ExperimentRecord> records) {
  std::vector<double> truth, est;
  for (const auto& r : records) {
    if (r.failed) continue;
    truth.push_back(r.true_llc_value);
    est.push_back(r.lambda_hat);
  }
  return order_preservation_rate(truth, est);
}

const GroupSummary* SweepSummary::find(Algorithm algo, int step_index) const {
  for (const auto& g : groups)
    if (g.algorithm == algo && g.step_index == step_index) return &g;
  return nullptr;
}

std::vector<const GroupSummary*> SweepSummary::for_algorithm(Algorithm algo) const {
  std::vector<const GroupSummary*> out;
  for (const auto& g : groups)
    if (g.algorithm == algo) out.push_back(&g);
  return out;
}

SweepSummary summarize(const std::vector<ExperimentRecord>& records) {
  std::map<std::pair<int, int>, std::vector<const ExperimentRecord*>> cells;
  for (const auto& r : records) cells[{std::get<1>(r.key()), r.step_index}].push_back(&r);

  SweepSummary out;
  for (const auto& [key, recs] : cells) {
    GroupSummary g;
    g.algorithm = recs.front()->algorithm;
    g.step_index = key.second;
    g.epsilon = recs.front()->epsilon;
    std::vector<double> rel;
    std::vector<ExperimentRecord> ran;
    for (const auto* r : recs) {
      if (r->failed) {
        ++g.failed;
        continue;
      }
      ++g.count;
      ran.push_back(*r);
      if (r->diverged || !std::isfinite(r->lambda_hat)) {
        ++g.nan_count;
        continue;
      }
      ++g.finite_count;
      if (r->relative_error)
        rel.push_back(*r->relative_error);
      else
        ++g.zero_llc_excluded;
    }
    g.relative_count = rel.size();
    if (!rel.empty()) {
      double mean = 0.0;
      for (double x : rel) mean += x;
      mean /= static_cast<double>(rel.size());
      double var = 0.0;
      for (double x : rel) var += (x - mean) * (x - mean);
      var /= static_cast<double>(rel.size());
      g.mean_relative_error = mean;
      g.std_relative_error = std::sqrt(var);
    }
    g.nan_fraction = g.count ? static_cast<double>(g.nan_count) / static_cast<double>(g.count) : 0.0;
    if (auto op = order_preservation_rate(ran)) {
      g.order_preservation = op->rate;
      g.order_pairs = op->eligible_pairs;
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

json summary_to_json(const SweepSummary& s) {
  auto opt = [](const std::optional<double>& x) { return x && std::isfinite(*x) ? json(*x) : json(nullptr); };
  json groups = json::array();
  for (const auto& g : s.groups) {
    groups.push_back(json{
        {"algorithm", std::string(to_string(g.algorithm))},
        {"step_index", g.step_index},
        {"epsilon", g.epsilon},
        {"count", g.count},
        {"failed", g.failed},
        {"nan_count", g.nan_count},
        {"finite_count", g.finite_count},
        {"relative_count", g.relative_count},
        {"zero_llc_excluded", g.zero_llc_excluded},
        {"mean_relative_error", opt(g.mean_relative_error)},
        {"std_relative_error", opt(g.std_relative_error)},
        {"nan_fraction", g.nan_fraction},
        {"order_preservation", opt(g.order_preservation)},
        {"order_pairs", g.order_pairs},
    });
  }
  return json{{"schema", "llcbench.summary"}, {"version", 1}, {"groups", groups}};
}

SweepSummary summary_from_json(const json& j) {
  if (j.value("schema", std::string{}) != "llcbench.summary") throw IoError("not a summary document");
  auto opt = [](const json& g, const char* k) -> std::optional<double> {
    if (!g.contains(k) || g.at(k).is_null()) return std::nullopt;
    return g.at(k).get<double>();
  };
  SweepSummary s;
  for (const auto& g : j.at("groups")) {
    GroupSummary out;
    out.algorithm = parse_algorithm(g.at("algorithm").get<std::string>());
    out.step_index = g.at("step_index").get<int>();
    out.epsilon = g.at("epsilon").get<double>();
    out.count = g.at("count").get<std::size_t>();
    out.failed = g.at("failed").get<std::size_t>();
    out.nan_count = g.at("nan_count").get<std::size_t>();
    out.finite_count = g.at("finite_count").get<std::size_t>();
    out.relative_count = g.at("relative_count").get<std::size_t>();
    out.zero_llc_excluded = g.at("zero_llc_excluded").get<std::size_t>();
    out.mean_relative_error = opt(g, "mean_relative_error");
    out.std_relative_error = opt(g, "std_relative_error");
    out.nan_fraction = g.at("nan_fraction").get<double>();
    out.order_preservation = opt(g, "order_preservation");
    out.order_pairs = g.at("order_pairs").get<std::size_t>();
    s.groups.push_back(out);
  }
  return s;
}

}  // namespace llcbench::bench
