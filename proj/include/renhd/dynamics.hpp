#pragma once

#include "renhd/rng.hpp"
#include "renhd/target.hpp"
#include "renhd/types.hpp"

#include <vector>

namespace renhd {

/// Diagnostic record of the thermostat variable and the kinetic term it
/// integrates, one row per recorded step.
struct ThermostatTrace {
  std::vector<long long> step;
  std::vector<double> s;
  std::vector<double> kinetic;  // v.v/d

  void append(long long step_idx, double s_value, double kinetic_value) {
    step.push_back(step_idx);
    s.push_back(s_value);
    kinetic.push_back(kinetic_value);
  }
  std::size_t size() const { return step.size(); }
};

/// Fresh replica at temperature T: v ~ N(0, T*eps) per coordinate,
/// s = c/T, theta zeroed (the caller supplies the start configuration).
ReplicaState init_replica(double temperature, const DynamicsConfig& cfg, int dim,
                          RngStream& rng);

/// One discrete thermostat step, in order: v += f~*eps - s*v + N(0, 2*c*eps);
/// theta += v; s += v.v/d - T*eps (with the updated v). Consumes exactly
/// dim Gaussian draws.
void nh_step(ReplicaState& state, const Vector& f_tilde, const DynamicsConfig& cfg,
             RngStream& rng);

/// traj_len iterations of {noisy gradient; nh_step}. step_offset only labels
/// trace rows and divergence reports.
void evolve(ReplicaState& state, const Target& target, const DynamicsConfig& cfg,
            RngStream& rng, ThermostatTrace* trace = nullptr,
            long long step_offset = 0, int replica_index = -1);

}  // namespace renhd
