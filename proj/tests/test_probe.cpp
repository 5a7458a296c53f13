#include <doctest.h>

#include "llcbench/bench/probe.hpp"
#include "llcbench/rng.hpp"

using namespace llcbench;
using namespace llcbench::bench;

namespace {

TaskSpec full_rank_task(int layers, std::uint64_t seed) {
  const DlnArchitecture arch(std::vector<Eigen::Index>(static_cast<std::size_t>(layers) + 1, 4));
  DatasetSettings data;
  data.n = 2000;
  return make_task("probe", sample_true_params(arch, seed, 0.0), seed, data);
}

}  // namespace

TEST_CASE("one layer grows quadratically") {
  const auto r = degree_probe(full_rank_task(1, 3), {});
  CHECK(r.expected_degree == 2);
  REQUIRE(r.slopes.size() == 4);
  for (double s : r.slopes) CHECK(s == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("three full-rank layers grow with degree six") {
  const auto r = degree_probe(full_rank_task(3, 5), {});
  CHECK(r.expected_degree == 6);
  for (double s : r.slopes) CHECK(std::abs(s - 6.0) < 0.2);
}

TEST_CASE("a flat direction grows slower than 2M") {
  // W1 = 0 and the direction only moves W2: the output stays zero
  DatasetSettings data;
  data.n = 500;
  auto task = make_task("flat", Params::from_layers({Matrix<double>::Zero(3, 3), Matrix<double>::Identity(3, 3)}), 2,
                        data);
  Vector<double> v = Vector<double>::Zero(task.parameter_count());
  v.tail(9).setOnes();
  const auto r = degree_probe(task, {v}, {});
  MESSAGE("slope along the flat direction " << r.slopes[0] << " (2M = " << r.expected_degree << ")");
  CHECK(r.slopes[0] < r.expected_degree);
}

TEST_CASE("grid validation") {
  const auto task = full_rank_task(1, 1);
  DegreeProbeOptions o;
  o.t_grid = {1.0, 10.0, 100.0};
  CHECK_THROWS_AS(degree_probe(task, o), ConfigError);
  o.t_grid = {1.0, 1000.0};
  CHECK_THROWS_AS(degree_probe(task, o), ConfigError);
  o.t_grid = {1.0, 500.0, 1000.0};
  CHECK_NOTHROW(degree_probe(task, o));
  o.directions = 0;
  CHECK_THROWS_AS(degree_probe(task, o), ConfigError);
  CHECK_THROWS_AS(degree_probe(task, {Vector<double>::Ones(3)}, {}), ContractError);
}

TEST_CASE("probe is deterministic in its seed") {
  const auto task = full_rank_task(2, 9);
  DegreeProbeOptions o;
  o.seed = 4;
  CHECK(degree_probe(task, o).slopes == degree_probe(task, o).slopes);
}
