#include "renhd/types.hpp"

#include <cmath>
#include <sstream>

namespace renhd {

TemperatureLadder build_ladder(double tau, int rungs) {
  if (!(tau > 1.0)) {
    std::ostringstream msg;
    msg << "ladder factor tau must be > 1, got " << tau;
    throw ConfigError(msg.str());
  }
  if (rungs < 1) {
    std::ostringstream msg;
    msg << "ladder needs at least 1 tempered rung, got " << rungs;
    throw ConfigError(msg.str());
  }
  TemperatureLadder ladder;
  ladder.tau = tau;
  ladder.rungs = rungs;
  ladder.temperatures.resize(rungs + 1);
  for (int j = 0; j <= rungs; ++j) ladder.temperatures[j] = std::pow(tau, j);
  ladder.temperatures[0] = 1.0;
  return ladder;
}

void DynamicsConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("dynamics.epsilon must be > 0");
  if (!(c > 0.0)) throw ConfigError("dynamics.c must be > 0");
  if (traj_len < 1) throw ConfigError("dynamics.traj_len must be >= 1");
  if (batch_size_nhd < 1)
    throw ConfigError("dynamics.batch_size_nhd must be >= 1");
}

void ExchangeConfig::validate() const {
  if (!(sigma2_star > 0.0)) throw ConfigError("exchange.sigma2_star must be > 0");
  if (!(lambda > 0.0)) throw ConfigError("exchange.lambda must be > 0");
  if (n_terms < 1) throw ConfigError("exchange.n_terms must be >= 1");
  if (batch_size_re < 2)
    throw ConfigError("exchange.batch_size_re must be >= 2 (variance needs two points)");
  if (exchange_every < 1) throw ConfigError("exchange.exchange_every must be >= 1");
}

}  // namespace renhd
