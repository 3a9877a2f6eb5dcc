#pragma once

#include "renhd/exchange.hpp"
#include "renhd/target.hpp"
#include "renhd/types.hpp"

#include <vector>

namespace renhd {

struct DiagnosticsReport {
  double ess = 0.0;
  double tv_distance = -1.0;  // -1 when no analytic target is available
  Vector mode_weights;
  Vector acceptance_by_pair;
  double acceptance_overall = 0.0;
  long long sample_count = 0;
};

/// ESS via the initial-positive-sequence truncation of the empirical
/// autocorrelation: n / (1 + 2 sum rho_t) summed while rho_t stays positive,
/// clamped to [1, n]. A constant series counts as a single sample.
double effective_sample_size(const Eigen::VectorXd& series);

/// Minimum single-coordinate ESS across dimensions.
double effective_sample_size(const std::vector<Vector>& samples);

/// Uniform 2-D histogram grid.
struct GridSpec {
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
  int nx = 0, ny = 0;

  int cells() const { return nx * ny; }
  double cell_area() const {
    return (x_hi - x_lo) / nx * ((y_hi - y_lo) / ny);
  }
};

/// Grid covering every mode center plus four component standard deviations.
GridSpec default_grid(const GaussianMixtureTarget& target, int cells_per_axis = 50);

/// Per-cell empirical masses plus the mass falling outside the grid
/// (appended as the final entry).
Vector histogram_masses(const std::vector<Vector>& samples, const GridSpec& grid);

/// Per-cell analytic masses of the mixture (3x3 midpoint rule per cell) plus
/// the leftover mass outside the grid as the final entry.
Vector analytic_masses(const GaussianMixtureTarget& target, const GridSpec& grid);

/// Total-variation distance between two mass vectors over the same partition.
double tv_distance(const Vector& mass_a, const Vector& mass_b);

/// TV between the sample histogram and the analytic mixture on the grid;
/// samples outside the grid land in the shared overflow cell.
double tv_distance_grid(const std::vector<Vector>& samples,
                        const GaussianMixtureTarget& target, const GridSpec& grid);

/// Fraction of samples within 3 component standard deviations of each mode.
Vector mode_coverage(const std::vector<Vector>& samples,
                     const GaussianMixtureTarget& target);

/// Acceptance fraction for each adjacent pair (j, j+1); pairs that were never
/// attempted report 0.
Vector acceptance_by_pair(const std::vector<ExchangeAttempt>& attempts,
                          int n_replicas);

double acceptance_overall(const std::vector<ExchangeAttempt>& attempts);

}  // namespace renhd
