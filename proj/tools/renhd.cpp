#include "renhd/compensation.hpp"
#include "renhd/config.hpp"
#include "renhd/diagnostics.hpp"
#include "renhd/io.hpp"
#include "renhd/orchestrator.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace renhd;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitIo = 3;
constexpr int kExitDeconv = 4;

int thread_cap_from_env() {
  const char* env = std::getenv("RENHD_THREADS");
  if (env == nullptr) return 0;
  const int cap = std::atoi(env);
  return cap > 0 ? cap : 0;
}

TemperatureLadder ladder_from_config(const RunConfigFile& cfg) {
  if (cfg.ladder.rungs == 0) {
    // Single unity-temperature replica: plain thermostat dynamics baseline.
    TemperatureLadder ladder;
    ladder.tau = cfg.ladder.tau;
    ladder.rungs = 0;
    ladder.temperatures = {1.0};
    return ladder;
  }
  return build_ladder(cfg.ladder.tau, cfg.ladder.rungs);
}

DiagnosticsReport make_report(const std::vector<Vector>& samples,
                              const std::vector<ExchangeAttempt>& attempts,
                              const Target* target, int n_replicas) {
  DiagnosticsReport report;
  report.sample_count = static_cast<long long>(samples.size());
  // The autocorrelation estimator needs a real chain behind it.
  report.ess = (samples.size() >= 100) ? effective_sample_size(samples) : -1.0;
  const auto* mixture = dynamic_cast<const GaussianMixtureTarget*>(target);
  if (mixture != nullptr && mixture->dim() == 2) {
    const GridSpec grid = default_grid(*mixture);
    report.tv_distance = tv_distance_grid(samples, *mixture, grid);
    report.mode_weights = mode_coverage(samples, *mixture);
  } else {
    report.mode_weights = Vector::Zero(0);
  }
  report.acceptance_by_pair = acceptance_by_pair(attempts, n_replicas);
  report.acceptance_overall = acceptance_overall(attempts);
  return report;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& resume_path) {
  RunConfigFile cfg;
  try {
    cfg = parse_config_file(config_path);
    for (const auto& assignment : overrides) apply_override(cfg, assignment);
    cfg.validate();
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const IoError& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return kExitIo;
  }

  try {
    const TemperatureLadder ladder = ladder_from_config(cfg);
    const auto target = make_target(cfg.target, cfg.dynamics.batch_size_nhd);

    fs::create_directories(cfg.run.output_dir);
    const fs::path out(cfg.run.output_dir);

    RunControl ctl;
    ctl.n_threads = thread_cap_from_env();
    ctl.checkpoint_every = cfg.run.checkpoint_every;
    ctl.checkpoint_path = (out / "checkpoint.bin").string();
    ThermostatTrace trace;
    if (cfg.run.trace_thermostat) ctl.trace0 = &trace;

    Checkpoint resume;
    if (!resume_path.empty()) {
      resume = load_checkpoint(resume_path);
      ctl.resume = &resume;
    }

    const RunRecord record = run(*target, ladder, cfg.dynamics, cfg.exchange,
                                 cfg.run.iterations, cfg.run.seed, ctl);

    write_samples_csv((out / "samples.csv").string(), record.samples);
    write_attempts_jsonl((out / "attempts.jsonl").string(), record.attempts);
    write_text_file((out / "config.ini").string(), canonical_config_string(cfg));

    const auto kept = burn_in_trim(record, cfg.run.burn_in);
    const DiagnosticsReport report =
        make_report(kept, record.attempts, target.get(), ladder.size());
    write_report_json((out / "report.json").string(), report);

    if (cfg.run.trace_thermostat) {
      std::ofstream ts(out / "thermostat.csv");
      ts << "step,s,kinetic\n";
      for (std::size_t i = 0; i < trace.size(); ++i)
        ts << trace.step[i] << ',' << trace.s[i] << ',' << trace.kinetic[i] << "\n";
    }

    std::cout << "wrote " << record.samples.size() << " samples to "
              << (out / "samples.csv").string() << "\n"
              << "exchange acceptance: " << report.acceptance_overall << " over "
              << record.attempts.size() << " attempts\n"
              << "ess: " << report.ess << "\n";
    if (report.tv_distance >= 0.0)
      std::cout << "tv distance: " << report.tv_distance << "\n";
    return 0;
  } catch (const DivergenceError& err) {
    std::cerr << "divergence: " << err.what() << "\n";
    return kExitDivergence;
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const IoError& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return kExitIo;
  }
}

int cmd_analyze(const std::string& samples_path, const std::string& config_path) {
  try {
    const RunConfigFile cfg = parse_config_file(config_path);
    const auto target = make_target(cfg.target, cfg.dynamics.batch_size_nhd);
    const auto samples = read_samples_csv(samples_path);
    if (samples.empty()) throw IoError(samples_path + ": no samples");

    std::vector<ExchangeAttempt> attempts;
    const fs::path attempts_path = fs::path(samples_path).parent_path() / "attempts.jsonl";
    if (fs::exists(attempts_path))
      attempts = read_attempts_jsonl(attempts_path.string());

    const TemperatureLadder ladder = ladder_from_config(cfg);
    const DiagnosticsReport report =
        make_report(samples, attempts, target.get(), ladder.size());

    const fs::path out_dir = fs::path(samples_path).parent_path();
    write_report_json((out_dir / "report.json").string(), report);

    const auto* mixture = dynamic_cast<const GaussianMixtureTarget*>(target.get());
    if (mixture != nullptr && mixture->dim() == 2) {
      const GridSpec grid = default_grid(*mixture);
      write_histogram_csv((out_dir / "histogram.csv").string(), grid,
                          histogram_masses(samples, grid),
                          analytic_masses(*mixture, grid));
    }

    std::cout << "ess: " << report.ess << "\n";
    if (report.tv_distance >= 0.0) {
      std::cout << "tv distance: " << report.tv_distance << "\n";
      std::cout << "mode weights:";
      for (Eigen::Index k = 0; k < report.mode_weights.size(); ++k)
        std::cout << ' ' << report.mode_weights[k];
      std::cout << "\n";
    }
    std::cout << "acceptance: " << report.acceptance_overall << "\n";
    return 0;
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const IoError& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return kExitIo;
  }
}

int cmd_check_deconv(double sigma2, double lambda, int n_terms,
                     const std::string& csv_path) {
  try {
    const CompensationDensity density = build_series(sigma2, lambda, n_terms);
    std::cout << "series coefficients (powers of the logistic function):\n";
    for (Eigen::Index i = 0; i < density.poly.size(); ++i)
      std::cout << "  g^" << (i + 1) << ": " << density.poly[i] << "\n";
    std::cout << "clamped negative mass: " << density.clamped_negative_mass << "\n";
    if (density.clamp_warning())
      std::cout << "warning: clamped negative mass exceeds "
                << CompensationDensity::kClampWarnThreshold
                << "; the series is too short for this (sigma2, lambda)\n";

    const double err = reconstruct(density, sigma2);
    std::cout << "reconstruction max-abs error vs standard logistic: " << err
              << " (threshold " << kDeconvRegressionThreshold << ")\n";

    if (!csv_path.empty()) {
      std::ofstream os(csv_path);
      if (!os) throw IoError("cannot open for writing: " + csv_path);
      os << "z,q_c,reconstruction,logistic\n";
      // Full-resolution reconstruction is already summarized by err; the CSV
      // keeps a plot-friendly subsample.
      const int stride = 64;
      const int n = static_cast<int>(density.grid_z.size());
      std::vector<double> recon(n, 0.0);
      {
        const double dz = density.grid_step();
        const double sigma = std::sqrt(sigma2);
        const int half = static_cast<int>(std::ceil(8.0 * sigma / dz)) + 1;
        for (int i = 0; i < n; i += stride) {
          double acc = 0.0;
          double wsum = 0.0;
          for (int m = -half; m <= half; ++m) {
            if (i - m < 0 || i - m >= n) continue;
            const double w = 0.5 * (std::erf((m + 0.5) * dz / (std::sqrt(2.0) * sigma)) -
                                    std::erf((m - 0.5) * dz / (std::sqrt(2.0) * sigma)));
            acc += w * density.pdf[i - m];
            wsum += w;
          }
          recon[i] = (wsum > 0) ? acc / wsum : 0.0;
        }
      }
      for (int i = 0; i < n; i += stride) {
        const double g = logistic(density.grid_z[i]);
        os << density.grid_z[i] << ',' << density.pdf[i] << ',' << recon[i]
           << ',' << g * (1.0 - g) << "\n";
      }
    }
    return err <= kDeconvRegressionThreshold ? 0 : kExitDeconv;
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const IoError& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"replica-exchange thermostatted sampler"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "execute a sampling run");
  std::string config_path;
  std::vector<std::string> overrides;
  std::string resume_path;
  run_cmd->add_option("config", config_path, "run configuration file")->required();
  run_cmd->add_option("--set", overrides, "override section.key=value");
  run_cmd->add_option("--resume", resume_path, "continue from a checkpoint file");

  auto* analyze_cmd = app.add_subcommand("analyze", "diagnostics for a sample file");
  std::string samples_path, analyze_config;
  analyze_cmd->add_option("samples", samples_path, "samples.csv from a run")->required();
  analyze_cmd->add_option("config", analyze_config, "config the run used")->required();

  auto* deconv_cmd =
      app.add_subcommand("check-deconv", "verify the compensation-density series");
  double sigma2 = 0.2, lambda = 10.0;
  int n_terms = 3;
  std::string deconv_csv;
  deconv_cmd->add_option("--sigma2", sigma2, "perturbation variance");
  deconv_cmd->add_option("--lambda", lambda, "kernel bandwidth");
  deconv_cmd->add_option("--terms", n_terms, "series terms");
  deconv_cmd->add_option("--csv", deconv_csv, "grid dump output path");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return cmd_run(config_path, overrides, resume_path);
  if (analyze_cmd->parsed()) return cmd_analyze(samples_path, analyze_config);
  if (deconv_cmd->parsed())
    return cmd_check_deconv(sigma2, lambda, n_terms, deconv_csv);
  return kExitConfig;
}
