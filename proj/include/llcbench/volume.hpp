#pragma once

// Monte-Carlo estimate of the volume-scaling exponent of loss sublevel sets:
// V(eps) = vol{ w in box : L(w) - L(w0) <= eps } ~ c eps^lambda (-log eps)^(m-1),
// fitted as the least-squares slope of log V against log eps.

#include <cstdint>
#include <functional>
#include <vector>

#include "llcbench/dln.hpp"
#include "llcbench/errors.hpp"
#include "llcbench/taskgen.hpp"

namespace llcbench {

class InsufficientSamples : public ComputationError {
 public:
  explicit InsufficientSamples(double eps)
      : ComputationError("insufficient-samples: no hits at eps = " + std::to_string(eps)), eps_(eps) {}
  double eps() const noexcept { return eps_; }

 private:
  double eps_;
};

struct VolumeOptions {
  std::vector<double> eps_grid;  // decreasing, positive, spanning >= 2 decades
  std::int64_t samples_per_eps = 1'000'000;
  double box_radius = 1.0;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct VolumeResult {
  double slope = 0.0;
  std::vector<double> eps;
  std::vector<double> volume;
  std::vector<std::int64_t> hits;
};

/// E[x x^T] for x ~ Uniform[low, high]^N.
Matrix<double> uniform_second_moment(Eigen::Index n, double low, double high);

/// L(w) - L(w0) = tr((W - W0) S (W - W0)^T) for input second moment S.
double population_excess_loss(const Params& params, const Matrix<double>& true_composite,
                              const Matrix<double>& second_moment);

/// Ordinary least-squares slope of y on x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Generic form: `excess` maps a point of the box around `center` to L(w) - L(w0).
VolumeResult mc_volume_exponent(const std::function<double(const Vector<double>&)>& excess,
                                const Vector<double>& center, const VolumeOptions& options);

/// Population loss of a DLN task, using exact second moments of its input law.
VolumeResult mc_volume_exponent(const TaskSpec& task, const VolumeOptions& options);

}  // namespace llcbench
