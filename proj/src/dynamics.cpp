#include "renhd/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace renhd {

ReplicaState init_replica(double temperature, const DynamicsConfig& cfg, int dim,
                          RngStream& rng) {
  if (temperature < 1.0) throw ConfigError("init_replica: temperature must be >= 1");
  if (dim < 1) throw ConfigError("init_replica: dim must be >= 1");
  if (!(cfg.epsilon > 0.0) || !(cfg.c > 0.0))
    throw ConfigError("init_replica: epsilon and c must be > 0");
  ReplicaState state;
  state.temperature = temperature;
  state.theta = Vector::Zero(dim);
  state.v = std::sqrt(temperature * cfg.epsilon) * rng.normal_vector(dim);
  state.s = cfg.c / temperature;
  return state;
}

void nh_step(ReplicaState& state, const Vector& f_tilde, const DynamicsConfig& cfg,
             RngStream& rng) {
  const int d = state.dim();
  const double noise_std = std::sqrt(2.0 * cfg.c * cfg.epsilon);
  for (int i = 0; i < d; ++i)
    state.v[i] += f_tilde[i] * cfg.epsilon - state.s * state.v[i] +
                  noise_std * rng.normal();
  state.theta += state.v;
  const double kinetic = state.v.squaredNorm();
  if (cfg.thermostat_per_dim)
    state.s += kinetic / d - state.temperature * cfg.epsilon;
  else
    state.s += kinetic - state.temperature * d * cfg.epsilon;
}

void evolve(ReplicaState& state, const Target& target, const DynamicsConfig& cfg,
            RngStream& rng, ThermostatTrace* trace, long long step_offset,
            int replica_index) {
  const int d = state.dim();
  for (int n = 0; n < cfg.traj_len; ++n) {
    const Vector f_tilde = target.noisy_gradient(state.theta, rng);
    if (!f_tilde.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite gradient at step " << step_offset + n;
      throw DivergenceError(msg.str(), replica_index, step_offset + n);
    }
    nh_step(state, f_tilde, cfg, rng);
    if (!state.theta.allFinite() || !state.v.allFinite() || !std::isfinite(state.s)) {
      std::ostringstream msg;
      msg << "non-finite replica state at step " << step_offset + n;
      throw DivergenceError(msg.str(), replica_index, step_offset + n);
    }
    if (trace != nullptr)
      trace->append(step_offset + n, state.s, state.v.squaredNorm() / d);
  }
}

}  // namespace renhd
