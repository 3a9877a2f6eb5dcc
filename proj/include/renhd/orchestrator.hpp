#pragma once

#include "renhd/dynamics.hpp"
#include "renhd/exchange.hpp"
#include "renhd/target.hpp"
#include "renhd/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace renhd {

/// Output of one sampling run: unity-temperature configurations (one per
/// outer iteration) plus every exchange attempt.
struct RunRecord {
  std::vector<Vector> samples;
  std::vector<ExchangeAttempt> attempts;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;  // fingerprint of the configuration used
  int n_replicas = 0;
  int iterations = 0;
  long long total_steps = 0;
  double wall_seconds = 0.0;
};

/// Ensemble snapshot for resume. rng_states holds one serialized stream per
/// replica followed by the scheduler stream.
struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  int iteration = 0;
  std::vector<ReplicaState> replicas;
  std::vector<std::string> rng_states;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

/// Fingerprint of everything a resumed run must agree on.
std::uint64_t config_fingerprint(const TemperatureLadder& ladder,
                                 const DynamicsConfig& d_cfg,
                                 const ExchangeConfig& x_cfg, int dim,
                                 std::uint64_t seed);

struct RunControl {
  int n_threads = 0;  // 0: one worker per replica
  int checkpoint_every = 0;
  std::string checkpoint_path;
  ThermostatTrace* trace0 = nullptr;  // thermostat trace of replica 0
  const Checkpoint* resume = nullptr;
};

/// Main loop: evolve every replica traj_len steps in parallel, run one
/// exchange phase over the adjacent-pair schedule, record theta_0. A single
/// replica degenerates to plain thermostat dynamics with no exchanges.
RunRecord run(const Target& target, const TemperatureLadder& ladder,
              const DynamicsConfig& d_cfg, const ExchangeConfig& x_cfg,
              int iterations, std::uint64_t seed, const RunControl& ctl = {});

/// Drops the first ceil(fraction * n) samples.
std::vector<Vector> burn_in_trim(const RunRecord& record, double fraction);

}  // namespace renhd
