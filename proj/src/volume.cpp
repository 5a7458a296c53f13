#include "llcbench/volume.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "llcbench/rng.hpp"

namespace llcbench {

Matrix<double> uniform_second_moment(Eigen::Index n, double low, double high) {
  const double mean = 0.5 * (low + high);
  const double second = (low * low + low * high + high * high) / 3.0;
  Matrix<double> s = Matrix<double>::Constant(n, n, mean * mean);
  s.diagonal().setConstant(second);
  return s;
}

double population_excess_loss(const Params& params, const Matrix<double>& true_composite,
                              const Matrix<double>& second_moment) {
  const Matrix<double> diff = composite_matrix(params) - true_composite;
  return (diff * second_moment).cwiseProduct(diff).sum();
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("least_squares_slope: need >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw ContractError("least_squares_slope: degenerate abscissae");
  return sxy / sxx;
}

namespace {

void check_options(const VolumeOptions& o) {
  if (o.eps_grid.size() < 2) throw ConfigError("volume: eps grid needs at least two values");
  for (std::size_t i = 0; i < o.eps_grid.size(); ++i) {
    if (!(o.eps_grid[i] > 0.0)) throw ConfigError("volume: eps values must be positive");
    if (i > 0 && !(o.eps_grid[i] < o.eps_grid[i - 1])) throw ConfigError("volume: eps grid must be decreasing");
  }
  if (o.eps_grid.front() / o.eps_grid.back() < 100.0) throw ConfigError("volume: eps grid must span two decades");
  if (o.samples_per_eps < 1) throw ConfigError("volume: samples_per_eps must be positive");
  if (!(o.box_radius > 0.0)) throw ConfigError("volume: box radius must be positive");
}

}  // namespace

VolumeResult mc_volume_exponent(const std::function<double(const Vector<double>&)>& excess,
                                const Vector<double>& center, const VolumeOptions& options) {
  check_options(options);
  const auto k = options.eps_grid.size();
  const auto dim = center.size();
  std::vector<std::int64_t> hits(k, 0);

  // one independent stream per eps value, so the split across workers cannot change results
  auto count = [&](std::size_t e) {
    CounterStream stream(derive_key(derive_key(options.seed, "volume"), e));
    Vector<double> w(dim);
    std::int64_t h = 0;
    for (std::int64_t s = 0; s < options.samples_per_eps; ++s) {
      for (Eigen::Index i = 0; i < dim; ++i) w(i) = center(i) + stream.uniform(-options.box_radius, options.box_radius);
      if (excess(w) <= options.eps_grid[e]) ++h;
    }
    hits[e] = h;
  };

  const auto workers = static_cast<std::size_t>(std::clamp<int>(options.workers, 1, static_cast<int>(k)));
  if (workers == 1) {
    for (std::size_t e = 0; e < k; ++e) count(e);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t e = t; e < k; e += workers) count(e);
      });
  }

  VolumeResult out;
  const double box_volume = std::pow(2.0 * options.box_radius, static_cast<double>(dim));
  std::vector<double> log_eps, log_v;
  for (std::size_t e = 0; e < k; ++e) {
    if (hits[e] == 0) throw InsufficientSamples(options.eps_grid[e]);
    const double v = box_volume * static_cast<double>(hits[e]) / static_cast<double>(options.samples_per_eps);
    out.eps.push_back(options.eps_grid[e]);
    out.volume.push_back(v);
    out.hits.push_back(hits[e]);
    log_eps.push_back(std::log(options.eps_grid[e]));
    log_v.push_back(std::log(v));
  }
  out.slope = least_squares_slope(log_eps, log_v);
  return out;
}

VolumeResult mc_volume_exponent(const TaskSpec& task, const VolumeOptions& options) {
  const auto& arch = task.architecture;
  const Matrix<double> moment = uniform_second_moment(arch.input_dim(), task.dataset.input_low, task.dataset.input_high);
  const Matrix<double> truth = composite_matrix(task.true_params);
  auto excess = [&](const Vector<double>& w) {
    return population_excess_loss(Params(arch, w), truth, moment);
  };
  return mc_volume_exponent(excess, task.true_params.flat(), options);
}

}  // namespace llcbench
