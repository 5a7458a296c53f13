#pragma once

#include <optional>
#include <span>
#include <vector>

#include "llcbench/bench/sweep.hpp"

namespace llcbench::bench {

struct OrderPreservation {
  double rate = 0.0;
  std::size_t eligible_pairs = 0;
};

/// Over unordered pairs with strictly different true LLCs and finite estimates on
/// both sides, the fraction whose estimates are ordered the same way. Absent when
/// no pair is eligible.
std::optional<OrderPreservation> order_preservation_rate(std::span<const double> true_llc,
                                                         std::span<const double> estimates);

std::optional<OrderPreservation> order_preservation_rate(std::span<const ExperimentRecord> records);

struct GroupSummary {
  Algorithm algorithm = Algorithm::Sgld;
  int step_index = 0;
  double epsilon = 0.0;
  std::size_t count = 0;   // records that ran (not failed)
  std::size_t failed = 0;
  std::size_t nan_count = 0;
  std::size_t finite_count = 0;
  std::size_t relative_count = 0;       // finite with a defined relative error
  std::size_t zero_llc_excluded = 0;    // finite but true LLC below the floor
  std::optional<double> mean_relative_error;
  std::optional<double> std_relative_error;  // population (ddof = 0)
  double nan_fraction = 0.0;                 // nan_count / count
  std::optional<double> order_preservation;
  std::size_t order_pairs = 0;
};

struct SweepSummary {
  std::vector<GroupSummary> groups;  // sorted by (algorithm, step_index)

  const GroupSummary* find(Algorithm algo, int step_index) const;
  std::vector<const GroupSummary*> for_algorithm(Algorithm algo) const;
};

SweepSummary summarize(const std::vector<ExperimentRecord>& records);

json summary_to_json(const SweepSummary& s);
SweepSummary summary_from_json(const json& j);

}  // namespace llcbench::bench
