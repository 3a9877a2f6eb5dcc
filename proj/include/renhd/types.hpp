#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace renhd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Invalid configuration value (bad ladder factor, nonpositive step size, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A trajectory produced a non-finite coordinate.
struct DivergenceError : std::runtime_error {
  int replica = -1;
  long long step = -1;
  DivergenceError(const std::string& what, int replica_idx, long long step_idx)
      : std::runtime_error(what), replica(replica_idx), step(step_idx) {}
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dynamic variables of one replica. theta and v share the dimension d;
/// v is the time-step-rescaled momentum and s the rescaled thermostat.
struct ReplicaState {
  Vector theta;
  Vector v;
  double s = 0.0;
  double temperature = 1.0;

  int dim() const { return static_cast<int>(theta.size()); }
};

/// Geometric temperature ladder: [1, tau, tau^2, ..., tau^M].
struct TemperatureLadder {
  double tau = 0.0;
  int rungs = 0;  // M tempered rungs above the unity-temperature replica
  std::vector<double> temperatures;

  int size() const { return static_cast<int>(temperatures.size()); }
};

TemperatureLadder build_ladder(double tau, int rungs);

/// Per-replica integrator settings. epsilon and c are the squared step size
/// and the background-noise intensity after the change of variables.
struct DynamicsConfig {
  double epsilon = 5e-6;
  double c = 0.1;
  int traj_len = 200;
  int batch_size_nhd = 128;
  // true: thermostat integrates v.v/d - T*eps; false: v.v - T*d*eps.
  bool thermostat_per_dim = true;

  void validate() const;
};

enum class PairSchedule { EvenOdd, RandomAdjacent };

struct ExchangeConfig {
  double sigma2_star = 0.2;
  double lambda = 10.0;
  int n_terms = 3;
  int batch_size_re = 256;
  PairSchedule pair_schedule = PairSchedule::EvenOdd;
  int exchange_every = 1;

  void validate() const;
};

}  // namespace renhd
