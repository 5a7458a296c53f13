#include "llcbench/bench/probe.hpp"

#include <algorithm>
#include <cmath>

#include "llcbench/rng.hpp"
#include "llcbench/volume.hpp"

namespace llcbench::bench {

DegreeProbeResult degree_probe(const TaskSpec& task, const std::vector<Vector<double>>& directions,
                               const DegreeProbeOptions& options) {
  const auto& grid = options.t_grid;
  if (grid.size() < 2) throw ConfigError("degree probe: t grid needs at least two points");
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  if (!(*lo > 0.0) || *hi / *lo < 1000.0 * (1.0 - 1e-9)) throw ConfigError("degree probe: t grid must span three decades");

  std::vector<double> top;
  for (double t : grid)
    if (t >= *hi / 10.0 * (1.0 - 1e-12)) top.push_back(t);
  if (top.size() < 2) throw ConfigError("degree probe: top decade needs at least two points");

  const Dataset data(task.dataset);
  const auto batch = data.prefix(std::min(options.probe_samples, data.size()));
  const auto& w0 = task.true_params.flat();

  DegreeProbeResult out;
  out.expected_degree = 2 * task.architecture.layers();
  for (const auto& dir : directions) {
    if (dir.size() != w0.size()) throw ContractError("degree probe: direction has wrong length");
    const Vector<double> v = dir.normalized();
    std::vector<double> log_t, log_loss;
    for (double t : top) {
      const Params w(task.architecture, w0 + t * v);
      log_t.push_back(std::log(t));
      log_loss.push_back(std::log(batch_loss(w, batch)));
    }
    out.slopes.push_back(least_squares_slope(log_t, log_loss));
  }
  return out;
}

DegreeProbeResult degree_probe(const TaskSpec& task, const DegreeProbeOptions& options) {
  if (options.directions < 1) throw ConfigError("degree probe: need at least one direction");
  CounterStream stream(derive_key(options.seed, "degree-probe"));
  std::vector<Vector<double>> dirs;
  for (int k = 0; k < options.directions; ++k) {
    Vector<double> v(task.parameter_count());
    stream.fill_normal(v);
    dirs.push_back(std::move(v));
  }
  return degree_probe(task, dirs, options);
}

}  // namespace llcbench::bench
