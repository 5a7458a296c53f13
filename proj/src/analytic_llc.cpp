#include "llcbench/analytic_llc.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace llcbench {

std::string to_string(LlcErrorKind kind) {
  switch (kind) {
    case LlcErrorKind::SigmaNotFound: return "sigma-not-found";
    case LlcErrorKind::SigmaAmbiguous: return "sigma-ambiguous";
    case LlcErrorKind::EllZero: return "ell-zero";
    case LlcErrorKind::ReadingsDisagree: return "condition3-readings-disagree";
  }
  return "unknown";
}

namespace {

std::string describe(LlcErrorKind kind, const std::vector<std::int64_t>& d) {
  std::string s = to_string(kind) + " for deltas (";
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s + ")";
}

}  // namespace

LlcError::LlcError(LlcErrorKind kind, std::vector<std::int64_t> deltas)
    : ComputationError(describe(kind, deltas)), kind_(kind), deltas_(std::move(deltas)) {}

std::vector<std::int64_t> deltas(const DlnArchitecture& arch, Eigen::Index r) {
  if (r < 0 || r > arch.min_size())
    throw ContractError("deltas: rank " + std::to_string(r) + " invalid for architecture " + arch.to_string());
  std::vector<std::int64_t> out;
  out.reserve(arch.sizes().size());
  for (auto h : arch.sizes()) out.push_back(static_cast<std::int64_t>(h - r));
  return out;
}

bool satisfies_sigma_conditions(std::span<const std::int64_t> deltas, std::span<const int> sigma,
                                Condition3 reading) {
  if (sigma.empty()) return false;
  std::vector<bool> in(deltas.size(), false);
  std::int64_t sum = 0;
  std::int64_t max_in = std::numeric_limits<std::int64_t>::min();
  for (int s : sigma) {
    in[static_cast<std::size_t>(s)] = true;
    sum += deltas[static_cast<std::size_t>(s)];
    max_in = std::max(max_in, deltas[static_cast<std::size_t>(s)]);
  }
  bool has_out = false;
  std::int64_t min_out = std::numeric_limits<std::int64_t>::max();
  std::int64_t max_out = std::numeric_limits<std::int64_t>::min();
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (in[i]) continue;
    has_out = true;
    min_out = std::min(min_out, deltas[i]);
    max_out = std::max(max_out, deltas[i]);
  }
  const auto ell = static_cast<std::int64_t>(sigma.size()) - 1;
  if (has_out && !(max_in < min_out)) return false;
  if (!(sum >= ell * max_in)) return false;
  if (has_out) {
    const auto bound = reading == Condition3::MinOverComplement ? min_out : max_out;
    if (!(sum < ell * bound)) return false;
  }
  return true;
}

std::vector<std::vector<int>> sigma_candidates(std::span<const std::int64_t> deltas, Condition3 reading) {
  std::vector<int> order(deltas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return deltas[static_cast<std::size_t>(i)] < deltas[static_cast<std::size_t>(j)]; });

  // condition (1) admits only prefixes that end at a tie-group boundary
  std::vector<std::vector<int>> found;
  for (std::size_t k = 1; k <= order.size(); ++k) {
    if (k < order.size() && deltas[static_cast<std::size_t>(order[k])] == deltas[static_cast<std::size_t>(order[k - 1])])
      continue;
    std::vector<int> sigma(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(sigma.begin(), sigma.end());
    if (satisfies_sigma_conditions(deltas, sigma, reading)) found.push_back(std::move(sigma));
  }
  return found;
}

SigmaDecomposition decompose(std::span<const std::int64_t> deltas, std::vector<int> sigma) {
  SigmaDecomposition sd;
  sd.deltas.assign(deltas.begin(), deltas.end());
  sd.ell = static_cast<std::int64_t>(sigma.size()) - 1;
  if (sd.ell < 1) throw LlcError(LlcErrorKind::EllZero, sd.deltas);
  std::int64_t sum = 0;
  for (int s : sigma) sum += deltas[static_cast<std::size_t>(s)];
  const auto ceil_div = (sum + sd.ell - 1) / sd.ell;  // sum >= 0
  sd.a = sum - sd.ell * (ceil_div - 1);
  sd.sigma = std::move(sigma);
  return sd;
}

SigmaDecomposition find_sigma(std::span<const std::int64_t> deltas, Condition3 reading) {
  if (deltas.empty()) throw ContractError("find_sigma: empty deltas");
  for (auto d : deltas)
    if (d < 0) throw ContractError("find_sigma: negative delta");
  auto found = sigma_candidates(deltas, reading);
  std::vector<std::int64_t> copy(deltas.begin(), deltas.end());
  if (found.empty()) throw LlcError(LlcErrorKind::SigmaNotFound, copy);
  if (found.size() > 1) throw LlcError(LlcErrorKind::SigmaAmbiguous, copy);
  return decompose(deltas, std::move(found.front()));
}

Rational llc_formula(const SigmaDecomposition& sd, std::int64_t input_dim, std::int64_t output_dim, std::int64_t r) {
  const auto ell = sd.ell;
  if (ell < 1) throw LlcError(LlcErrorKind::EllZero, sd.deltas);
  std::int64_t sum = 0;
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < sd.sigma.size(); ++i) {
    const auto di = sd.deltas[static_cast<std::size_t>(sd.sigma[i])];
    pairs += di * sum;
    sum += di;
  }
  // 4 ell lambda = 2 ell (r(H0 + HM) - r^2) + a(ell - a) - (ell - 1) S^2 + 2 ell P
  const std::int64_t numerator = 2 * ell * (r * (input_dim + output_dim) - r * r) + sd.a * (ell - sd.a) -
                                 (ell - 1) * sum * sum + 2 * ell * pairs;
  return Rational(numerator, 4 * ell);
}

LlcValue analytic_llc(const DlnArchitecture& arch, Eigen::Index r) {
  const auto d = deltas(arch, r);
  const auto h_in = static_cast<std::int64_t>(arch.input_dim());
  const auto h_out = static_cast<std::int64_t>(arch.output_dim());
  const auto rr = static_cast<std::int64_t>(r);

  LlcValue value;
  value.decomposition = find_sigma(d, Condition3::MinOverComplement);
  value.lambda = llc_formula(value.decomposition, h_in, h_out, rr);

  // the min-reading Sigma always qualifies under the weaker max reading; any
  // additional qualifying Sigma must reproduce the same value
  for (auto& alt : sigma_candidates(d, Condition3::MaxOverComplement)) {
    if (alt == value.decomposition.sigma) continue;
    const auto alt_sd = decompose(d, std::move(alt));
    if (llc_formula(alt_sd, h_in, h_out, rr) != value.lambda) throw LlcError(LlcErrorKind::ReadingsDisagree, d);
  }
  return value;
}

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

}  // namespace llcbench
