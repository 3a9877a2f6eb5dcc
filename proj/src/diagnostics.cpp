#include "renhd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace renhd {

double effective_sample_size(const Eigen::VectorXd& series) {
  const Eigen::Index n = series.size();
  if (n < 100)
    throw std::invalid_argument("effective_sample_size: need at least 100 samples");
  const double mean = series.mean();
  const Eigen::ArrayXd centered = series.array() - mean;
  const double gamma0 = centered.square().sum() / n;
  if (gamma0 <= 0.0) return 1.0;

  double rho_sum = 0.0;
  const Eigen::Index max_lag = std::min<Eigen::Index>(n - 1, 20000);
  for (Eigen::Index t = 1; t < max_lag; ++t) {
    const double gamma_t =
        (centered.head(n - t) * centered.tail(n - t)).sum() / n;
    const double rho = gamma_t / gamma0;
    if (rho <= 0.0) break;
    rho_sum += rho;
  }
  const double ess = n / (1.0 + 2.0 * rho_sum);
  return std::clamp(ess, 1.0, static_cast<double>(n));
}

double effective_sample_size(const std::vector<Vector>& samples) {
  if (samples.empty())
    throw std::invalid_argument("effective_sample_size: empty sample list");
  const int d = static_cast<int>(samples[0].size());
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  double min_ess = static_cast<double>(n);
  for (int c = 0; c < d; ++c) {
    Eigen::VectorXd series(n);
    for (Eigen::Index i = 0; i < n; ++i) series[i] = samples[i][c];
    min_ess = std::min(min_ess, effective_sample_size(series));
  }
  return min_ess;
}

GridSpec default_grid(const GaussianMixtureTarget& target, int cells_per_axis) {
  if (target.dim() != 2)
    throw std::invalid_argument("default_grid: grid diagnostics are 2-D");
  GridSpec grid;
  grid.nx = grid.ny = cells_per_axis;
  grid.x_lo = grid.y_lo = std::numeric_limits<double>::max();
  grid.x_hi = grid.y_hi = std::numeric_limits<double>::lowest();
  for (int k = 0; k < target.components(); ++k) {
    const double pad = 4.0 * target.component_std(k);
    grid.x_lo = std::min(grid.x_lo, target.mean(k)[0] - pad);
    grid.x_hi = std::max(grid.x_hi, target.mean(k)[0] + pad);
    grid.y_lo = std::min(grid.y_lo, target.mean(k)[1] - pad);
    grid.y_hi = std::max(grid.y_hi, target.mean(k)[1] + pad);
  }
  return grid;
}

Vector histogram_masses(const std::vector<Vector>& samples, const GridSpec& grid) {
  Vector mass = Vector::Zero(grid.cells() + 1);
  if (samples.empty()) return mass;
  const double wx = (grid.x_hi - grid.x_lo) / grid.nx;
  const double wy = (grid.y_hi - grid.y_lo) / grid.ny;
  for (const auto& sample : samples) {
    const int ix = static_cast<int>(std::floor((sample[0] - grid.x_lo) / wx));
    const int iy = static_cast<int>(std::floor((sample[1] - grid.y_lo) / wy));
    if (ix < 0 || ix >= grid.nx || iy < 0 || iy >= grid.ny)
      mass[grid.cells()] += 1.0;
    else
      mass[iy * grid.nx + ix] += 1.0;
  }
  mass /= static_cast<double>(samples.size());
  return mass;
}

Vector analytic_masses(const GaussianMixtureTarget& target, const GridSpec& grid) {
  Vector mass = Vector::Zero(grid.cells() + 1);
  const double wx = (grid.x_hi - grid.x_lo) / grid.nx;
  const double wy = (grid.y_hi - grid.y_lo) / grid.ny;
  Vector point(2);
  double inside = 0.0;
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      double acc = 0.0;
      for (int sy = 0; sy < 3; ++sy) {
        for (int sx = 0; sx < 3; ++sx) {
          point[0] = grid.x_lo + (ix + (sx + 0.5) / 3.0) * wx;
          point[1] = grid.y_lo + (iy + (sy + 0.5) / 3.0) * wy;
          acc += std::exp(-target.potential(point));
        }
      }
      const double cell_mass = acc / 9.0 * wx * wy;
      mass[iy * grid.nx + ix] = cell_mass;
      inside += cell_mass;
    }
  }
  mass[grid.cells()] = std::max(0.0, 1.0 - inside);
  return mass;
}

double tv_distance(const Vector& mass_a, const Vector& mass_b) {
  if (mass_a.size() != mass_b.size())
    throw std::invalid_argument("tv_distance: partition size mismatch");
  return 0.5 * (mass_a - mass_b).cwiseAbs().sum();
}

double tv_distance_grid(const std::vector<Vector>& samples,
                        const GaussianMixtureTarget& target, const GridSpec& grid) {
  return tv_distance(histogram_masses(samples, grid),
                     analytic_masses(target, grid));
}

Vector mode_coverage(const std::vector<Vector>& samples,
                     const GaussianMixtureTarget& target) {
  Vector coverage = Vector::Zero(target.components());
  if (samples.empty()) return coverage;
  for (const auto& sample : samples) {
    for (int k = 0; k < target.components(); ++k) {
      const double radius = 3.0 * target.component_std(k);
      if ((sample - target.mean(k)).norm() <= radius) coverage[k] += 1.0;
    }
  }
  coverage /= static_cast<double>(samples.size());
  return coverage;
}

Vector acceptance_by_pair(const std::vector<ExchangeAttempt>& attempts,
                          int n_replicas) {
  const int n_pairs = std::max(0, n_replicas - 1);
  Vector accepted = Vector::Zero(n_pairs);
  Vector total = Vector::Zero(n_pairs);
  for (const auto& attempt : attempts) {
    const int pair = std::min(attempt.j, attempt.k);
    if (pair < 0 || pair >= n_pairs) continue;
    total[pair] += 1.0;
    if (attempt.accepted) accepted[pair] += 1.0;
  }
  for (int p = 0; p < n_pairs; ++p)
    accepted[p] = (total[p] > 0.0) ? accepted[p] / total[p] : 0.0;
  return accepted;
}

double acceptance_overall(const std::vector<ExchangeAttempt>& attempts) {
  if (attempts.empty()) return 0.0;
  double accepted = 0.0;
  for (const auto& attempt : attempts)
    if (attempt.accepted) accepted += 1.0;
  return accepted / static_cast<double>(attempts.size());
}

}  // namespace renhd
