#pragma once

// Closed-form local learning coefficient of a deep linear network at a true
// parameter of composite rank r, evaluated in exact rational arithmetic.
//
// With Delta_i = H_i - r, the formula needs an index set Sigma of {0..M} with
//   (1) max Delta over Sigma  <  min Delta over the complement
//   (2) sum Delta over Sigma  >= ell * max Delta over Sigma
//   (3) sum Delta over Sigma  <  ell * min Delta over the complement
// where ell = |Sigma| - 1. Condition (3) is also evaluated with max in place
// of min; a ground truth is only emitted when both readings give the same value.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "llcbench/dln.hpp"
#include "llcbench/errors.hpp"

namespace llcbench {

using Rational = boost::rational<std::int64_t>;

enum class Condition3 { MinOverComplement, MaxOverComplement };

struct SigmaDecomposition {
  std::vector<std::int64_t> deltas;
  std::vector<int> sigma;  // ascending indices into deltas
  std::int64_t ell = 0;
  std::int64_t a = 0;
};

enum class LlcErrorKind { SigmaNotFound, SigmaAmbiguous, EllZero, ReadingsDisagree };

std::string to_string(LlcErrorKind kind);

class LlcError : public ComputationError {
 public:
  LlcError(LlcErrorKind kind, std::vector<std::int64_t> deltas);

  LlcErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::int64_t>& deltas() const noexcept { return deltas_; }

 private:
  LlcErrorKind kind_;
  std::vector<std::int64_t> deltas_;
};

struct LlcValue {
  Rational lambda;
  SigmaDecomposition decomposition;

  double value() const { return boost::rational_cast<double>(lambda); }
};

/// Delta_i = H_i - r; throws ContractError if r is negative or exceeds some H_i.
std::vector<std::int64_t> deltas(const DlnArchitecture& arch, Eigen::Index r);

/// Checks conditions (1)-(3) for an arbitrary subset (ascending indices).
bool satisfies_sigma_conditions(std::span<const std::int64_t> deltas, std::span<const int> sigma,
                                Condition3 reading = Condition3::MinOverComplement);

/// Every tie-group prefix of the Delta-sorted order that satisfies (1)-(3).
std::vector<std::vector<int>> sigma_candidates(std::span<const std::int64_t> deltas,
                                               Condition3 reading = Condition3::MinOverComplement);

/// The unique qualifying Sigma; throws LlcError (SigmaNotFound / SigmaAmbiguous).
SigmaDecomposition find_sigma(std::span<const std::int64_t> deltas,
                              Condition3 reading = Condition3::MinOverComplement);

/// Decomposition for a given Sigma (computes ell and a); throws EllZero when |Sigma| = 1.
SigmaDecomposition decompose(std::span<const std::int64_t> deltas, std::vector<int> sigma);

/// The four-term formula for given outer sizes H_0, H_M and rank r.
Rational llc_formula(const SigmaDecomposition& sd, std::int64_t input_dim, std::int64_t output_dim, std::int64_t r);

/// Exact LLC; throws LlcError when no trustworthy value exists.
LlcValue analytic_llc(const DlnArchitecture& arch, Eigen::Index r);

std::string to_string(const Rational& q);

}  // namespace llcbench
