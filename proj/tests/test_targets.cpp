#include "renhd/target.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace renhd;

namespace {

// Finite-difference force oracle: -dU/dtheta_i by central differences.
Vector fd_force(const Target& target, const Vector& theta, double h = 1e-6) {
  Vector g(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Vector plus = theta, minus = theta;
    plus[i] += h;
    minus[i] -= h;
    g[i] = -(target.potential(plus) - target.potential(minus)) / (2.0 * h);
  }
  return g;
}

GaussianMixtureTarget two_modes_apart(double separation, double noise = 0.0) {
  Vector mu1(2), mu2(2);
  mu1 << -separation / 2.0, 0.0;
  mu2 << separation / 2.0, 0.0;
  return GaussianMixtureTarget({mu1, mu2},
                               {Matrix::Identity(2, 2), Matrix::Identity(2, 2)},
                               Vector::Constant(2, 0.5), noise);
}

}  // namespace

TEST_CASE("single standard-normal mode: potential at the mode is log(2 pi)") {
  GaussianMixtureTarget target({Vector::Zero(2)}, {Matrix::Identity(2, 2)},
                               Vector::Constant(1, 1.0));
  CHECK(target.potential(Vector::Zero(2)) ==
        doctest::Approx(std::log(2.0 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("well-separated mixture: potential at one mode ignores the other") {
  const auto target = two_modes_apart(20.0);
  Vector at_mode(2);
  at_mode << -10.0, 0.0;
  const double expected = -std::log(0.5 / (2.0 * std::numbers::pi));
  CHECK(std::abs(target.potential(at_mode) - expected) < 1e-6);
}

TEST_CASE("five-mode target has exactly five interior local minima") {
  const auto target = make_five_mode_circle(0.0);
  const int n = 161;
  const double lo = -6.0, hi = 6.0;
  std::vector<double> u(n * n);
  Vector point(2);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      point[0] = lo + (hi - lo) * ix / (n - 1);
      point[1] = lo + (hi - lo) * iy / (n - 1);
      u[iy * n + ix] = target.potential(point);
    }
  int minima = 0;
  for (int iy = 1; iy + 1 < n; ++iy)
    for (int ix = 1; ix + 1 < n; ++ix) {
      const double center = u[iy * n + ix];
      bool is_min = true;
      for (int dy = -1; dy <= 1 && is_min; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (u[(iy + dy) * n + ix + dx] <= center) {
            is_min = false;
            break;
          }
        }
      if (is_min) ++minima;
    }
  CHECK(minima == 5);

  // Each mode center is a local minimum against small perturbations.
  for (int k = 0; k < 5; ++k) {
    const double at_center = target.potential(target.mean(k));
    for (double angle : {0.0, 1.0, 2.0, 4.0}) {
      Vector off = target.mean(k);
      off[0] += 0.05 * std::cos(angle);
      off[1] += 0.05 * std::sin(angle);
      CHECK(target.potential(off) > at_center);
    }
  }
}

TEST_CASE("noiseless noisy_gradient equals the exact gradient and matches "
          "finite differences") {
  const auto target = make_five_mode_circle(0.0);
  RngStream rng(11, 0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector theta = 6.0 * Vector::NullaryExpr(2, [&](Eigen::Index) {
                     return rng.uniform() - 0.5;
                   });
    const Vector exact = target.gradient(theta);
    CHECK((target.noisy_gradient(theta, rng) - exact).norm() == 0.0);
    const Vector fd = fd_force(target, theta);
    const double scale = std::max(1.0, exact.norm());
    CHECK((exact - fd).norm() / scale < 1e-5);
  }
}

TEST_CASE("injected gradient noise is unbiased with the configured variance") {
  const auto target = make_five_mode_circle(0.25);
  RngStream rng(12, 0);
  Vector theta(2);
  theta << 1.0, -2.0;
  const Vector exact = target.gradient(theta);
  const int n = 100000;
  Vector sum = Vector::Zero(2), sum_sq = Vector::Zero(2);
  for (int i = 0; i < n; ++i) {
    const Vector draw = target.noisy_gradient(theta, rng);
    sum += draw;
    sum_sq += draw.cwiseProduct(draw);
  }
  const Vector mean = sum / n;
  for (int c = 0; c < 2; ++c) {
    const double var = sum_sq[c] / n - mean[c] * mean[c];
    const double se = std::sqrt(0.25 / n);
    CHECK(std::abs(mean[c] - exact[c]) < 3.0 * se);
    CHECK(var == doctest::Approx(0.25).epsilon(0.05));
  }
}

TEST_CASE("mirrored two-mode target: gradient vanishes exactly on the "
          "symmetry axis") {
  const auto target = two_modes_apart(6.0);
  for (double y : {-2.0, 0.0, 1.5}) {
    Vector theta(2);
    theta << 0.0, y;
    CHECK(target.gradient(theta)[0] == 0.0);
  }
}

TEST_CASE("mixture potential is invariant under component permutation") {
  RngStream rng(13, 0);
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  Vector weights(3);
  weights << 0.2, 0.5, 0.3;
  for (int k = 0; k < 3; ++k) {
    Vector mu(2);
    mu << 4.0 * rng.normal(), 4.0 * rng.normal();
    means.push_back(mu);
    Matrix a(2, 2);
    a << 1.0 + rng.uniform(), 0.3 * rng.normal(), 0.3 * rng.normal(),
        1.0 + rng.uniform();
    covs.push_back(a * a.transpose() + 0.1 * Matrix::Identity(2, 2));
  }
  const GaussianMixtureTarget original(means, covs, weights);

  std::vector<int> perm = {2, 0, 1};
  std::vector<Vector> p_means;
  std::vector<Matrix> p_covs;
  Vector p_weights(3);
  for (int k = 0; k < 3; ++k) {
    p_means.push_back(means[perm[k]]);
    p_covs.push_back(covs[perm[k]]);
    p_weights[k] = weights[perm[k]];
  }
  const GaussianMixtureTarget permuted(p_means, p_covs, p_weights);

  for (int trial = 0; trial < 50; ++trial) {
    Vector theta(2);
    theta << 8.0 * (rng.uniform() - 0.5), 8.0 * (rng.uniform() - 0.5);
    CHECK(original.potential(theta) ==
          doctest::Approx(permuted.potential(theta)).epsilon(1e-12));
  }
}

TEST_CASE("mixture construction rejects invalid inputs") {
  const Vector mu = Vector::Zero(2);
  const Matrix id = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(GaussianMixtureTarget({mu}, {id}, Vector::Constant(1, 0.9)),
                  ConfigError);
  Matrix not_pd(2, 2);
  not_pd << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(GaussianMixtureTarget({mu}, {not_pd}, Vector::Constant(1, 1.0)),
                  ConfigError);
  CHECK_THROWS_AS(
      GaussianMixtureTarget({mu, mu}, {id, id}, Vector::Constant(1, 1.0)),
      ConfigError);
}

TEST_CASE("non-finite configurations are rejected") {
  const auto target = make_five_mode_circle(0.0);
  Vector bad(2);
  bad << std::numeric_limits<double>::quiet_NaN(), 0.0;
  CHECK_THROWS_AS(target.potential(bad), std::invalid_argument);
  CHECK_THROWS_AS(target.gradient(bad), std::invalid_argument);
}

TEST_CASE("full-batch mini-batch gradient equals the exact gradient") {
  const auto target = make_bimodal_mean_target(200, 2.0, 1.0, 10.0, 7, 32);
  std::vector<int> full(200);
  for (int i = 0; i < 200; ++i) full[i] = i;
  Vector theta(1);
  for (double t : {-2.3, -0.5, 0.0, 1.1, 2.0}) {
    theta[0] = t;
    const Vector full_batch = target.minibatch_gradient(theta, full);
    const Vector exact = target.gradient(theta);
    CHECK((full_batch - exact).norm() < 1e-12 * std::max(1.0, exact.norm()));
    // Gradient consistency against the potential.
    const Vector fd = fd_force(target, theta, 1e-6);
    CHECK((exact - fd).norm() / std::max(1.0, exact.norm()) < 1e-5);
  }
}

TEST_CASE("mini-batch gradients are unbiased over batch draws") {
  // Flat prior, unit-variance Gaussian likelihood around theta.
  const int n_data = 100;
  RngStream gen(21, 0);
  Eigen::VectorXd data(n_data);
  for (int i = 0; i < n_data; ++i) data[i] = 0.5 + gen.normal();
  MiniBatchModelTarget target(
      1, data, [](const Vector&) { return 0.0; },
      [](const Vector&) { return Vector::Zero(1); },
      [](const Vector& t, double x) { return -0.5 * (x - t[0]) * (x - t[0]); },
      [](const Vector& t, double x) {
        Vector g(1);
        g[0] = x - t[0];
        return g;
      },
      10);

  Vector theta(1);
  theta[0] = 0.2;
  const Vector exact = target.gradient(theta);
  RngStream rng(22, 0);
  const int n_draws = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const double g = target.noisy_gradient(theta, rng)[0];
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n_draws;
  const double sd = std::sqrt(sum_sq / n_draws - mean * mean);
  CHECK(std::abs(mean - exact[0]) < 3.0 * sd / std::sqrt(n_draws));
}

TEST_CASE("singleton batch reproduces the direct substitution") {
  // Same flat-prior Gaussian-mean model; datum value is known by construction.
  Eigen::VectorXd data(3);
  data << -1.0, 0.4, 2.5;
  MiniBatchModelTarget target(
      1, data, [](const Vector&) { return 0.0; },
      [](const Vector&) { return Vector::Zero(1); },
      [](const Vector& t, double x) { return -0.5 * (x - t[0]) * (x - t[0]); },
      [](const Vector& t, double x) {
        Vector g(1);
        g[0] = x - t[0];
        return g;
      },
      2);
  Vector theta(1);
  theta[0] = 0.7;
  const std::vector<int> batch = {2};
  const Vector got = target.minibatch_gradient(theta, batch);
  CHECK(got[0] == doctest::Approx(3.0 * (2.5 - 0.7)).epsilon(1e-12));
}

TEST_CASE("mini-batch edge cases") {
  const auto target = make_bimodal_mean_target(50, 2.0, 1.0, 10.0, 7, 8);
  Vector theta = Vector::Zero(1);
  CHECK_THROWS_AS(target.minibatch_gradient(theta, std::vector<int>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(target.minibatch_gradient(theta, std::vector<int>{50}),
                  std::out_of_range);
}

TEST_CASE("potential_diff_terms reproduces exact potential differences on the "
          "full dataset") {
  const auto target = make_bimodal_mean_target(150, 2.0, 1.0, 10.0, 7, 32);
  std::vector<int> full(150);
  for (int i = 0; i < 150; ++i) full[i] = i;
  RngStream rng(23, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Vector a(1), b(1);
    a[0] = 3.0 * rng.normal();
    b[0] = 3.0 * rng.normal();
    const auto terms = target.potential_diff_terms(a, b, full);
    const double diff_from_terms =
        -(terms.prior_log_ratio + terms.per_datum_log_ratio.sum());
    CHECK(diff_from_terms ==
          doctest::Approx(target.potential(a) - target.potential(b)).epsilon(1e-10));
  }
}

TEST_CASE("batch draws are without replacement and growth appends unused "
          "points") {
  RngStream rng(31, 0);
  BatchDraw draw(20, rng);
  draw.grow(8);
  std::vector<int> first(draw.batch().begin(), draw.batch().end());
  CHECK(first.size() == 8);
  draw.grow(30);  // clipped at the population size
  CHECK(draw.size() == 20);
  CHECK(draw.exhausted());
  std::vector<int> all(draw.batch().begin(), draw.batch().end());
  // Prefix preserved by growth.
  for (int i = 0; i < 8; ++i) CHECK(all[i] == first[i]);
  // Every index exactly once.
  std::sort(all.begin(), all.end());
  for (int i = 0; i < 20; ++i) CHECK(all[i] == i);
}

TEST_CASE("exact mixture sampler hits component proportions") {
  const auto target = make_five_mode_circle(0.0);
  RngStream rng(41, 0);
  std::vector<int> counts(5, 0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const Vector draw = target.sample_exact(rng);
    int best = 0;
    double best_dist = std::numeric_limits<double>::max();
    for (int k = 0; k < 5; ++k) {
      const double dist = (draw - target.mean(k)).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    ++counts[best];
  }
  for (int k = 0; k < 5; ++k)
    CHECK(static_cast<double>(counts[k]) / n == doctest::Approx(0.2).epsilon(0.05));
}
