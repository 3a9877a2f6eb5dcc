#pragma once

#include "renhd/compensation.hpp"
#include "renhd/rng.hpp"
#include "renhd/target.hpp"
#include "renhd/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace renhd {

/// Everything one exchange attempt saw and decided.
struct ExchangeAttempt {
  int phase = 0;
  int j = 0;
  int k = 0;
  double delta_e = 0.0;       // estimate of [U(theta_j)-U(theta_k)][1/T_j-1/T_k]
  double var_estimate = 0.0;  // variance of that estimate at test time
  int batch_used = 0;         // 0 on the exact+injected-noise path
  bool accepted = false;
  double z_c = 0.0;
  double z_n_star = 0.0;
};

struct DeltaEstimate {
  double delta = 0.0;
  double variance = 0.0;
  int batch_used = 0;
};

/// Mini-batch estimate of the energy gap times the inverse-temperature gap,
/// positive when the swap moves the lower-energy configuration to the colder
/// rung. Variance is the without-replacement estimator
/// c_T^2 (|D|^2/|S|) s_l^2 (1 - |S|/|D|) over the per-datum log-ratios.
DeltaEstimate delta_e_estimate(const Vector& theta_j, const Vector& theta_k,
                               double t_j, double t_k, const Target& target,
                               std::span<const int> batch);

/// Exact-potential path for targets without mini-batch structure: the gap is
/// evaluated through noisy_potential (fresh injected noise per evaluation) and
/// the variance is the known injected amount.
DeltaEstimate delta_e_estimate(const Vector& theta_j, const Vector& theta_k,
                               double t_j, double t_k, const Target& target,
                               RngStream& rng);

/// Full protocol for one pair: grow the batch until the estimate variance
/// drops below sigma2_star, top the noise up to exactly sigma2_star with a
/// Gaussian draw, add a compensation draw, accept on a positive sum. Only the
/// configurations are swapped; momenta and thermostats stay with their rungs.
ExchangeAttempt attempt_exchange(ReplicaState& state_j, ReplicaState& state_k,
                                 const Target& target, const ExchangeConfig& cfg,
                                 const CompensationDensity& density, RngStream& rng,
                                 int phase = 0, int index_j = 0, int index_k = 1);

/// Deterministic alternating schedule over adjacent rungs: even phases pair
/// (0,1),(2,3),..., odd phases (1,2),(3,4),...
std::vector<std::pair<int, int>> pair_schedule(int n_replicas, int phase);

/// Alternative schedule: a random maximal set of disjoint adjacent pairs.
std::vector<std::pair<int, int>> random_adjacent_pairs(int n_replicas, RngStream& rng);

}  // namespace renhd
