#include "renhd/diagnostics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace renhd;

namespace {

Eigen::VectorXd ar1_series(double phi, int n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  Eigen::VectorXd series(n);
  series[0] = rng.normal();
  const double innovation = std::sqrt(1.0 - phi * phi);
  for (int i = 1; i < n; ++i)
    series[i] = phi * series[i - 1] + innovation * rng.normal();
  return series;
}

}  // namespace

TEST_CASE("ess of an iid series is close to the sample count") {
  RngStream rng(1, 0);
  Eigen::VectorXd series(10000);
  for (int i = 0; i < 10000; ++i) series[i] = rng.normal();
  const double ess = effective_sample_size(series);
  CHECK(ess > 0.9 * 10000);
  CHECK(ess <= 1.1 * 10000);
}

TEST_CASE("ess of AR(1) chains matches the closed-form autocorrelation time") {
  const int n = 100000;
  for (double phi : {0.5, 0.9, 0.99}) {
    const double expected = n * (1.0 - phi) / (1.0 + phi);
    const double ess = effective_sample_size(ar1_series(phi, n, 7));
    CHECK(ess == doctest::Approx(expected).epsilon(0.15));
  }
}

TEST_CASE("alternating series caps at the sample count") {
  Eigen::VectorXd series(1000);
  for (int i = 0; i < 1000; ++i) series[i] = (i % 2 == 0) ? 1.0 : -1.0;
  CHECK(effective_sample_size(series) == 1000.0);
}

TEST_CASE("constant series degenerates to a single effective sample") {
  Eigen::VectorXd series = Eigen::VectorXd::Constant(500, 3.25);
  CHECK(effective_sample_size(series) == 1.0);
}

TEST_CASE("ess needs at least 100 samples and multivariate takes the minimum") {
  Eigen::VectorXd tiny(50);
  tiny.setRandom();
  CHECK_THROWS_AS(effective_sample_size(tiny), std::invalid_argument);

  // One iid coordinate, one sticky AR(1) coordinate.
  const int n = 20000;
  const auto slow = ar1_series(0.95, n, 3);
  RngStream rng(4, 0);
  std::vector<Vector> samples(n);
  for (int i = 0; i < n; ++i) {
    Vector v(2);
    v << rng.normal(), slow[i];
    samples[i] = v;
  }
  const double min_ess = effective_sample_size(samples);
  const double slow_ess = effective_sample_size(slow);
  CHECK(min_ess == doctest::Approx(slow_ess).epsilon(1e-12));
  CHECK(min_ess < 0.2 * n);
}

TEST_CASE("tv distance: direct samples from the target land under 0.05") {
  const auto target = make_five_mode_circle(0.0);
  RngStream rng(5, 0);
  std::vector<Vector> samples;
  samples.reserve(100000);
  for (int i = 0; i < 100000; ++i) samples.push_back(target.sample_exact(rng));
  const GridSpec grid = default_grid(target);
  CHECK(tv_distance_grid(samples, target, grid) < 0.05);
}

TEST_CASE("tv distance: single-mode collapse scores about 0.8") {
  const auto target = make_five_mode_circle(0.0);
  RngStream rng(6, 0);
  std::vector<Vector> samples;
  for (int i = 0; i < 50000; ++i) {
    Vector draw = target.mean(0);
    draw[0] += std::sqrt(0.1) * rng.normal();
    draw[1] += std::sqrt(0.1) * rng.normal();
    samples.push_back(draw);
  }
  const GridSpec grid = default_grid(target);
  CHECK(tv_distance_grid(samples, target, grid) == doctest::Approx(0.8).epsilon(0.04));
}

TEST_CASE("tv distance is symmetric, zero on identical masses, and flags "
          "mismatched partitions") {
  Vector a(4), b(4);
  a << 0.1, 0.4, 0.3, 0.2;
  b << 0.25, 0.25, 0.25, 0.25;
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == tv_distance(b, a));
  CHECK(tv_distance(a, b) == doctest::Approx(0.2).epsilon(1e-12));
  Vector c(3);
  c << 0.5, 0.3, 0.2;
  CHECK_THROWS_AS(tv_distance(a, c), std::invalid_argument);
}

TEST_CASE("analytic grid masses integrate to one over a wide grid") {
  const auto target = make_five_mode_circle(0.0);
  const GridSpec grid = default_grid(target);
  const Vector masses = analytic_masses(target, grid);
  CHECK(masses.sum() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(masses[masses.size() - 1] < 1e-3);  // little mass outside
}

TEST_CASE("mode coverage: exact sampler spreads a fifth per basin") {
  const auto target = make_five_mode_circle(0.0);
  RngStream rng(7, 0);
  std::vector<Vector> samples;
  for (int i = 0; i < 100000; ++i) samples.push_back(target.sample_exact(rng));
  const Vector coverage = mode_coverage(samples, target);
  REQUIRE(coverage.size() == 5);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(coverage[k] - 0.2) < 0.01);
  CHECK(coverage.sum() <= 1.0);
}

TEST_CASE("mode coverage: collapsed samples fill one basin only") {
  const auto target = make_five_mode_circle(0.0);
  std::vector<Vector> samples(1000, target.mean(2));
  const Vector coverage = mode_coverage(samples, target);
  for (int k = 0; k < 5; ++k) CHECK(coverage[k] == (k == 2 ? 1.0 : 0.0));
}

TEST_CASE("mode coverage: uniform box samples match the basin area fraction") {
  const auto target = make_five_mode_circle(0.0);
  RngStream rng(8, 0);
  std::vector<Vector> samples;
  const double half = 8.0;
  for (int i = 0; i < 100000; ++i) {
    Vector v(2);
    v << (2.0 * rng.uniform() - 1.0) * half, (2.0 * rng.uniform() - 1.0) * half;
    samples.push_back(v);
  }
  const Vector coverage = mode_coverage(samples, target);
  const double radius = 3.0 * std::sqrt(0.1);
  const double fraction =
      std::numbers::pi * radius * radius / (4.0 * half * half);
  for (int k = 0; k < 5; ++k)
    CHECK(coverage[k] == doctest::Approx(fraction).epsilon(0.3));
}

TEST_CASE("acceptance bookkeeping by pair and overall") {
  std::vector<ExchangeAttempt> attempts;
  for (int i = 0; i < 10; ++i) {
    ExchangeAttempt a;
    a.j = i % 2;
    a.k = a.j + 1;
    a.accepted = (i % 4 == 0);
    attempts.push_back(a);
  }
  // pair (0,1): attempts at even i, accepted at i = 0, 4, 8 -> 3/5;
  // pair (1,2): attempts at odd i, none accepted.
  const Vector by_pair = acceptance_by_pair(attempts, 3);
  REQUIRE(by_pair.size() == 2);
  CHECK(by_pair[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(by_pair[1] == 0.0);
  CHECK(acceptance_overall(attempts) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(acceptance_overall({}) == 0.0);
}
