#include <doctest.h>

#include <cmath>

#include "llcbench/dataset.hpp"
#include "llcbench/rng.hpp"
#include "llcbench/volume.hpp"

using namespace llcbench;

namespace {

VolumeOptions grid(std::vector<double> eps, std::int64_t samples = 200000, double box = 1.0) {
  VolumeOptions o;
  o.eps_grid = std::move(eps);
  o.samples_per_eps = samples;
  o.box_radius = box;
  o.seed = 5;
  return o;
}

}  // namespace

TEST_CASE("uniform second moment matches sampling") {
  const auto s = uniform_second_moment(3, -10.0, 10.0);
  CHECK(s(0, 0) == doctest::Approx(100.0 / 3));
  CHECK(s(0, 1) == 0.0);
  const auto t = uniform_second_moment(2, 1.0, 3.0);
  CHECK(t(0, 0) == doctest::Approx(13.0 / 3));
  CHECK(t(0, 1) == doctest::Approx(4.0));

  CounterStream r(1);
  double xx = 0, xy = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double a = r.uniform(1.0, 3.0), b = r.uniform(1.0, 3.0);
    xx += a * a;
    xy += a * b;
  }
  CHECK(xx / n == doctest::Approx(t(0, 0)).epsilon(0.005));
  CHECK(xy / n == doctest::Approx(t(0, 1)).epsilon(0.005));
}

TEST_CASE("population excess loss agrees with the empirical loss difference") {
  Matrix<double> w1(2, 3), w2(2, 2);
  w1 << 0.3, -0.2, 0.5, 0.1, 0.4, -0.3;
  w2 << 1.0, 0.5, -0.5, 0.2;
  const auto truth = Params::from_layers({w1, w2});
  DatasetSpec spec;
  spec.n = 100000;
  spec.seed = 3;
  spec.noise_variance = 0.0;
  spec.true_params = truth;
  const Dataset data(spec);
  auto moved = truth;
  moved.flat().array() += 0.05;
  const auto batch = data.prefix(spec.n);
  const double empirical = batch_loss(moved, batch) - batch_loss(truth, batch);
  const double exact =
      population_excess_loss(moved, data.true_composite(), uniform_second_moment(3, spec.input_low, spec.input_high));
  CHECK(empirical == doctest::Approx(exact).epsilon(0.02));
  CHECK(population_excess_loss(truth, data.true_composite(), uniform_second_moment(3, -10, 10)) == 0.0);
}

TEST_CASE("least squares slope") {
  CHECK(least_squares_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(least_squares_slope({1}, {1}), ContractError);
  CHECK_THROWS_AS(least_squares_slope({1, 1}, {1, 2}), ContractError);
}

TEST_CASE("one-dimensional quadratic has exponent 1/2") {
  auto quad = [](const Vector<double>& w) { return w(0) * w(0); };
  const auto r = mc_volume_exponent(quad, Vector<double>::Zero(1), grid({1e-1, 1e-2, 1e-3, 1e-4, 1e-5}));
  CHECK(r.slope == doctest::Approx(0.5).epsilon(0.1));
  // V(eps) = 2 sqrt(eps)
  CHECK(r.volume.front() == doctest::Approx(2.0 * std::sqrt(0.1)).epsilon(0.02));
}

TEST_CASE("options are validated") {
  auto f = [](const Vector<double>& w) { return w.squaredNorm(); };
  const Vector<double> c = Vector<double>::Zero(1);
  CHECK_THROWS_AS(mc_volume_exponent(f, c, grid({1e-1})), ConfigError);
  CHECK_THROWS_AS(mc_volume_exponent(f, c, grid({1e-3, 1e-1})), ConfigError);
  CHECK_THROWS_AS(mc_volume_exponent(f, c, grid({1e-1, 1e-2})), ConfigError);
  CHECK_THROWS_AS(mc_volume_exponent(f, c, grid({1e-1, 1e-3}, 0)), ConfigError);
}

TEST_CASE("zero hits is reported as insufficient samples") {
  auto f = [](const Vector<double>& w) { return w.squaredNorm(); };
  try {
    mc_volume_exponent(f, Vector<double>::Zero(4), grid({1.0, 1e-8}, 1000));
    FAIL("expected InsufficientSamples");
  } catch (const InsufficientSamples& e) {
    CHECK(e.eps() == 1e-8);
    CHECK(std::string(e.what()).find("insufficient-samples") != std::string::npos);
  }
}

TEST_CASE("worker count does not change the result") {
  auto f = [](const Vector<double>& w) { return std::pow(w(0) * w(1), 2); };
  auto o = grid({1e-2, 1e-3, 1e-4, 1e-5}, 50000);
  const auto a = mc_volume_exponent(f, Vector<double>::Zero(2), o);
  o.workers = 3;
  const auto b = mc_volume_exponent(f, Vector<double>::Zero(2), o);
  CHECK(a.hits == b.hits);
  CHECK(a.slope == b.slope);
}

TEST_CASE("task overload on the 1-1-1 zero map") {
  DatasetSettings data;
  auto task = make_task("zero", Params::from_layers({Matrix<double>::Zero(1, 1), Matrix<double>::Zero(1, 1)}), 1, data);
  attach_llc(task);
  REQUIRE(task.true_llc->value() == 0.5);
  // excess = (100/3) (w1 w2)^2; shift the grid by the same factor
  const double k = 100.0 / 3;
  const auto r = mc_volume_exponent(task, grid({k * 1e-4, k * 1e-6, k * 1e-8}, 1000000));
  CHECK(r.slope == doctest::Approx(0.5).epsilon(0.2));
}
