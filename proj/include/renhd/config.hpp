#pragma once

#include "renhd/target.hpp"
#include "renhd/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace renhd {

enum class TargetKind { FiveModeCircle, GaussianMixture, Harmonic, BimodalMean };

struct TargetSection {
  TargetKind kind = TargetKind::FiveModeCircle;
  double noise_variance = 0.0;
  // five-mode-circle
  double radius = 4.0;
  double component_variance = 0.1;
  // gaussian-mixture (semicolon-separated rows)
  std::string means;
  std::string covariances;
  std::string weights;
  // harmonic
  int dim = 1;
  double curvature = 1.0;
  // bimodal-mean dataset parameters
  int n_data = 1000;
  double theta_true = 2.0;
  double lik_sigma = 1.0;
  double prior_sigma = 10.0;
  std::uint64_t data_seed = 7;
};

struct LadderSection {
  double tau = 1.5;
  int rungs = 7;
};

struct RunSection {
  int iterations = 1000;
  std::uint64_t seed = 1;
  double burn_in = 0.1;
  std::string output_dir = "out";
  int checkpoint_every = 0;
  bool trace_thermostat = false;
};

struct RunConfigFile {
  TargetSection target;
  LadderSection ladder;
  DynamicsConfig dynamics;
  ExchangeConfig exchange;
  RunSection run;

  void validate() const;
};

/// Parses the sectioned key=value config; errors carry "path:line:".
RunConfigFile parse_config_file(const std::string& path);

/// Applies one "section.key=value" override on top of a parsed config.
void apply_override(RunConfigFile& cfg, const std::string& assignment);

std::unique_ptr<Target> make_target(const TargetSection& section,
                                    int batch_size_nhd);

/// Canonical text form, written next to run outputs as the config snapshot.
std::string canonical_config_string(const RunConfigFile& cfg);

}  // namespace renhd
