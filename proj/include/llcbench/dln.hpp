#pragma once

// Deep linear networks f(x; w) = W_M ... W_1 x and their squared-error loss.
//
// Parameters live in one contiguous vector; layer l (0-based) is a column-major
// H_{l+1} x H_l block viewed through Eigen::Map. Samplers work on the flat
// vector directly, the model code works on the layer views.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "llcbench/errors.hpp"

namespace llcbench {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

class DlnArchitecture {
 public:
  DlnArchitecture() = default;

  /// sizes = (H_0, ..., H_M); requires M >= 1 and every H_i >= 1.
  explicit DlnArchitecture(std::vector<Eigen::Index> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw ContractError("DlnArchitecture: need at least one layer");
    for (auto h : sizes_)
      if (h < 1) throw ContractError("DlnArchitecture: layer sizes must be positive");
    offsets_.resize(sizes_.size());
    offsets_[0] = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l)
      offsets_[l + 1] = offsets_[l] + sizes_[l] * sizes_[l + 1];
  }

  int layers() const noexcept { return static_cast<int>(sizes_.size()) - 1; }
  const std::vector<Eigen::Index>& sizes() const noexcept { return sizes_; }
  Eigen::Index size(int i) const { return sizes_.at(static_cast<std::size_t>(i)); }
  Eigen::Index input_dim() const noexcept { return sizes_.front(); }
  Eigen::Index output_dim() const noexcept { return sizes_.back(); }

  /// d = sum_l H_l H_{l-1}
  Eigen::Index parameter_count() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }
  Eigen::Index layer_offset(int l) const { return offsets_.at(static_cast<std::size_t>(l)); }
  Eigen::Index layer_rows(int l) const { return size(l + 1); }
  Eigen::Index layer_cols(int l) const { return size(l); }

  Eigen::Index min_size() const { return *std::min_element(sizes_.begin(), sizes_.end()); }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
      if (i) s += '-';
      s += std::to_string(sizes_[i]);
    }
    return s;
  }

  friend bool operator==(const DlnArchitecture& a, const DlnArchitecture& b) { return a.sizes_ == b.sizes_; }

 private:
  std::vector<Eigen::Index> sizes_;
  std::vector<Eigen::Index> offsets_;
};

template <typename Scalar>
class DlnParams {
 public:
  using LayerMap = Eigen::Map<Matrix<Scalar>>;
  using ConstLayerMap = Eigen::Map<const Matrix<Scalar>>;

  DlnParams() = default;

  explicit DlnParams(DlnArchitecture arch)
      : arch_(std::move(arch)), flat_(Vector<Scalar>::Zero(arch_.parameter_count())) {}

  DlnParams(DlnArchitecture arch, Vector<Scalar> flat) : arch_(std::move(arch)), flat_(std::move(flat)) {
    if (flat_.size() != arch_.parameter_count())
      throw ContractError("DlnParams: flat vector length does not match architecture");
  }

  /// Builds from explicit layer matrices W_1..W_M; shapes must chain.
  static DlnParams from_layers(const std::vector<Matrix<Scalar>>& layers) {
    if (layers.empty()) throw ContractError("DlnParams: need at least one layer");
    std::vector<Eigen::Index> sizes{layers.front().cols()};
    for (const auto& w : layers) {
      if (w.cols() != sizes.back()) throw ContractError("DlnParams: layer shapes do not chain");
      sizes.push_back(w.rows());
    }
    DlnParams p(DlnArchitecture(std::move(sizes)));
    for (int l = 0; l < p.layers(); ++l) p.layer(l) = layers[static_cast<std::size_t>(l)];
    return p;
  }

  const DlnArchitecture& architecture() const noexcept { return arch_; }
  int layers() const noexcept { return arch_.layers(); }

  LayerMap layer(int l) {
    return LayerMap(flat_.data() + arch_.layer_offset(l), arch_.layer_rows(l), arch_.layer_cols(l));
  }
  ConstLayerMap layer(int l) const {
    return ConstLayerMap(flat_.data() + arch_.layer_offset(l), arch_.layer_rows(l), arch_.layer_cols(l));
  }

  Vector<Scalar>& flat() noexcept { return flat_; }
  const Vector<Scalar>& flat() const noexcept { return flat_; }

  bool all_finite() const { return flat_.allFinite(); }

  template <typename Other>
  DlnParams<Other> cast() const {
    return DlnParams<Other>(arch_, flat_.template cast<Other>());
  }

 private:
  DlnArchitecture arch_;
  Vector<Scalar> flat_;
};

/// Samples are stored as columns: inputs is N x m, targets is N' x m.
template <typename Scalar>
struct Batch {
  Matrix<Scalar> inputs;
  Matrix<Scalar> targets;
  std::vector<std::uint64_t> indices;

  Eigen::Index size() const noexcept { return inputs.cols(); }
};

/// W_M W_{M-1} ... W_1
template <typename Scalar>
Matrix<Scalar> composite_matrix(const DlnParams<Scalar>& params) {
  if (params.layers() < 1) throw ContractError("composite_matrix: empty parameters");
  Matrix<Scalar> w = params.layer(0);
  for (int l = 1; l < params.layers(); ++l) w = params.layer(l) * w;
  return w;
}

template <typename Scalar, typename Derived>
Vector<Scalar> forward(const DlnParams<Scalar>& params, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != params.architecture().input_dim())
    throw ContractError("forward: input length " + std::to_string(x.size()) + " does not match H_0 = " +
                        std::to_string(params.architecture().input_dim()));
  Vector<Scalar> h = x;
  for (int l = 0; l < params.layers(); ++l) h = params.layer(l) * h;
  return h;
}

namespace detail {

template <typename Scalar>
void check_batch(const DlnParams<Scalar>& params, const Batch<Scalar>& batch, const char* who) {
  const auto& arch = params.architecture();
  if (batch.inputs.cols() < 1) throw ContractError(std::string(who) + ": empty batch");
  if (batch.inputs.rows() != arch.input_dim() || batch.targets.rows() != arch.output_dim() ||
      batch.targets.cols() != batch.inputs.cols())
    throw ContractError(std::string(who) + ": batch shape does not match architecture " + arch.to_string());
}

/// Pushes the batch through the network, keeping every layer's input: acts[l] = W_l ... W_1 X.
template <typename Scalar>
std::vector<Matrix<Scalar>> activations(const DlnParams<Scalar>& params, const Matrix<Scalar>& inputs) {
  std::vector<Matrix<Scalar>> acts;
  acts.reserve(static_cast<std::size_t>(params.layers()) + 1);
  acts.push_back(inputs);
  for (int l = 0; l < params.layers(); ++l) acts.push_back(params.layer(l) * acts.back());
  return acts;
}

}  // namespace detail

/// (1/m) sum_j ||f(X_j; w) - Y_j||^2. Non-finite inputs give a non-finite result.
template <typename Scalar>
Scalar batch_loss(const DlnParams<Scalar>& params, const Batch<Scalar>& batch) {
  detail::check_batch(params, batch, "batch_loss");
  Matrix<Scalar> h = batch.inputs;
  for (int l = 0; l < params.layers(); ++l) h = params.layer(l) * h;
  return (h - batch.targets).squaredNorm() / static_cast<Scalar>(batch.size());
}

template <typename Scalar>
struct LossAndGradient {
  Scalar loss;
  DlnParams<Scalar> gradient;
};

/// Loss and its gradient in one forward/backward pass.
///
/// dL/dW_l = (2/m) A_l^T R B_l^T with R = W X - Y, A_l = W_M ... W_{l+1} and
/// B_l = W_{l-1} ... W_1 X; the backward sweep accumulates A_l^T R right to left.
template <typename Scalar>
LossAndGradient<Scalar> batch_loss_and_gradient(const DlnParams<Scalar>& params, const Batch<Scalar>& batch) {
  detail::check_batch(params, batch, "batch_loss_gradient");
  const auto m = static_cast<Scalar>(batch.size());
  auto acts = detail::activations(params, batch.inputs);
  Matrix<Scalar> upstream = acts.back() - batch.targets;
  const Scalar loss = upstream.squaredNorm() / m;
  upstream *= Scalar(2) / m;

  DlnParams<Scalar> grad(params.architecture());
  for (int l = params.layers() - 1; l >= 0; --l) {
    grad.layer(l).noalias() = upstream * acts[static_cast<std::size_t>(l)].transpose();
    if (l > 0) upstream = params.layer(l).transpose() * upstream;
  }
  return {loss, std::move(grad)};
}

template <typename Scalar>
DlnParams<Scalar> batch_loss_gradient(const DlnParams<Scalar>& params, const Batch<Scalar>& batch) {
  return batch_loss_and_gradient(params, batch).gradient;
}

using Params = DlnParams<double>;
using DoubleBatch = Batch<double>;

}  // namespace llcbench
