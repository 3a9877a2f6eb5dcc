#include "renhd/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace renhd {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct ConfigSetter {
  RunConfigFile* cfg;
  std::string where;  // "path:line" or "override"

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(where + ": " + message);
  }

  double parse_double(const std::string& value) const {
    try {
      std::size_t used = 0;
      const double out = std::stod(value, &used);
      if (used != value.size()) fail("trailing characters in number '" + value + "'");
      return out;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("expected a number, got '" + value + "'");
    }
  }

  long long parse_int(const std::string& value) const {
    long long out = 0;
    const auto* begin = value.data();
    const auto* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end)
      fail("expected an integer, got '" + value + "'");
    return out;
  }

  bool parse_bool(const std::string& value) const {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail("expected true/false, got '" + value + "'");
  }

  void set(const std::string& section, const std::string& key,
           const std::string& value) const {
    if (section == "target")
      set_target(key, value);
    else if (section == "ladder")
      set_ladder(key, value);
    else if (section == "dynamics")
      set_dynamics(key, value);
    else if (section == "exchange")
      set_exchange(key, value);
    else if (section == "run")
      set_run(key, value);
    else
      fail("unknown section [" + section + "]");
  }

  void set_target(const std::string& key, const std::string& value) const {
    auto& t = cfg->target;
    if (key == "kind") {
      if (value == "five-mode-circle")
        t.kind = TargetKind::FiveModeCircle;
      else if (value == "gaussian-mixture")
        t.kind = TargetKind::GaussianMixture;
      else if (value == "harmonic")
        t.kind = TargetKind::Harmonic;
      else if (value == "bimodal-mean")
        t.kind = TargetKind::BimodalMean;
      else
        fail("unknown target.kind '" + value + "'");
    } else if (key == "noise_variance") {
      t.noise_variance = parse_double(value);
      if (t.noise_variance < 0) fail("target.noise_variance must be >= 0");
    } else if (key == "radius") {
      t.radius = parse_double(value);
    } else if (key == "component_variance") {
      t.component_variance = parse_double(value);
      if (t.component_variance <= 0) fail("target.component_variance must be > 0");
    } else if (key == "means") {
      t.means = value;
    } else if (key == "covariances") {
      t.covariances = value;
    } else if (key == "weights") {
      t.weights = value;
    } else if (key == "dim") {
      t.dim = static_cast<int>(parse_int(value));
      if (t.dim < 1) fail("target.dim must be >= 1");
    } else if (key == "curvature") {
      t.curvature = parse_double(value);
      if (t.curvature <= 0) fail("target.curvature must be > 0");
    } else if (key == "n_data") {
      t.n_data = static_cast<int>(parse_int(value));
      if (t.n_data < 2) fail("target.n_data must be >= 2");
    } else if (key == "theta_true") {
      t.theta_true = parse_double(value);
    } else if (key == "lik_sigma") {
      t.lik_sigma = parse_double(value);
      if (t.lik_sigma <= 0) fail("target.lik_sigma must be > 0");
    } else if (key == "prior_sigma") {
      t.prior_sigma = parse_double(value);
      if (t.prior_sigma <= 0) fail("target.prior_sigma must be > 0");
    } else if (key == "data_seed") {
      t.data_seed = static_cast<std::uint64_t>(parse_int(value));
    } else {
      fail("unknown key target." + key);
    }
  }

  void set_ladder(const std::string& key, const std::string& value) const {
    if (key == "tau") {
      cfg->ladder.tau = parse_double(value);
      if (!(cfg->ladder.tau > 1.0)) fail("ladder.tau must be > 1");
    } else if (key == "rungs") {
      cfg->ladder.rungs = static_cast<int>(parse_int(value));
      if (cfg->ladder.rungs < 0) fail("ladder.rungs must be >= 0");
    } else {
      fail("unknown key ladder." + key);
    }
  }

  void set_dynamics(const std::string& key, const std::string& value) const {
    auto& d = cfg->dynamics;
    if (key == "epsilon") {
      d.epsilon = parse_double(value);
      if (!(d.epsilon > 0)) fail("dynamics.epsilon must be > 0");
    } else if (key == "c") {
      d.c = parse_double(value);
      if (!(d.c > 0)) fail("dynamics.c must be > 0");
    } else if (key == "traj_len") {
      d.traj_len = static_cast<int>(parse_int(value));
      if (d.traj_len < 1) fail("dynamics.traj_len must be >= 1");
    } else if (key == "batch_size_nhd") {
      d.batch_size_nhd = static_cast<int>(parse_int(value));
      if (d.batch_size_nhd < 1) fail("dynamics.batch_size_nhd must be >= 1");
    } else if (key == "thermostat_per_dim") {
      d.thermostat_per_dim = parse_bool(value);
    } else {
      fail("unknown key dynamics." + key);
    }
  }

  void set_exchange(const std::string& key, const std::string& value) const {
    auto& x = cfg->exchange;
    if (key == "sigma2_star") {
      x.sigma2_star = parse_double(value);
      if (!(x.sigma2_star > 0)) fail("exchange.sigma2_star must be > 0");
    } else if (key == "lambda") {
      x.lambda = parse_double(value);
      if (!(x.lambda > 0)) fail("exchange.lambda must be > 0");
    } else if (key == "n_terms") {
      x.n_terms = static_cast<int>(parse_int(value));
      if (x.n_terms < 1) fail("exchange.n_terms must be >= 1");
    } else if (key == "batch_size_re") {
      x.batch_size_re = static_cast<int>(parse_int(value));
      if (x.batch_size_re < 2) fail("exchange.batch_size_re must be >= 2");
    } else if (key == "pair_schedule") {
      if (value == "even-odd")
        x.pair_schedule = PairSchedule::EvenOdd;
      else if (value == "random-adjacent")
        x.pair_schedule = PairSchedule::RandomAdjacent;
      else
        fail("unknown exchange.pair_schedule '" + value + "'");
    } else if (key == "exchange_every") {
      x.exchange_every = static_cast<int>(parse_int(value));
      if (x.exchange_every < 1) fail("exchange.exchange_every must be >= 1");
    } else {
      fail("unknown key exchange." + key);
    }
  }

  void set_run(const std::string& key, const std::string& value) const {
    auto& r = cfg->run;
    if (key == "iterations") {
      r.iterations = static_cast<int>(parse_int(value));
      if (r.iterations < 1) fail("run.iterations must be >= 1");
    } else if (key == "seed") {
      r.seed = static_cast<std::uint64_t>(parse_int(value));
    } else if (key == "burn_in") {
      r.burn_in = parse_double(value);
      if (!(r.burn_in >= 0) || r.burn_in >= 1) fail("run.burn_in must lie in [0, 1)");
    } else if (key == "output_dir") {
      r.output_dir = value;
    } else if (key == "checkpoint_every") {
      r.checkpoint_every = static_cast<int>(parse_int(value));
      if (r.checkpoint_every < 0) fail("run.checkpoint_every must be >= 0");
    } else if (key == "trace_thermostat") {
      r.trace_thermostat = parse_bool(value);
    } else {
      fail("unknown key run." + key);
    }
  }
};

std::vector<Vector> parse_vector_rows(const std::string& text, const std::string& what) {
  std::vector<Vector> rows;
  std::stringstream row_stream(text);
  std::string row;
  while (std::getline(row_stream, row, ';')) {
    row = trim(row);
    if (row.empty()) continue;
    std::istringstream values(row);
    std::vector<double> entries;
    double v = 0.0;
    while (values >> v) entries.push_back(v);
    if (!values.eof())
      throw ConfigError("target." + what + ": cannot parse row '" + row + "'");
    if (entries.empty()) continue;
    Vector out(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i)
      out[static_cast<Eigen::Index>(i)] = entries[i];
    rows.push_back(std::move(out));
  }
  if (rows.empty()) throw ConfigError("target." + what + " is empty");
  return rows;
}

}  // namespace

void RunConfigFile::validate() const {
  dynamics.validate();
  exchange.validate();
  if (ladder.rungs >= 1 && !(ladder.tau > 1.0))
    throw ConfigError("ladder.tau must be > 1");
}

RunConfigFile parse_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open config file: " + path);
  RunConfigFile cfg;
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError(where + ": key before any [section] header");
    if (key.empty()) throw ConfigError(where + ": empty key");
    ConfigSetter{&cfg, where}.set(section, key, value);
  }
  cfg.validate();
  return cfg;
}

void apply_override(RunConfigFile& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "': expected section.key=value");
  const std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = path.find('.');
  if (dot == std::string::npos)
    throw ConfigError("override '" + assignment + "': expected section.key=value");
  ConfigSetter{&cfg, "override " + path}.set(path.substr(0, dot),
                                             path.substr(dot + 1), value);
}

std::unique_ptr<Target> make_target(const TargetSection& section,
                                    int batch_size_nhd) {
  switch (section.kind) {
    case TargetKind::FiveModeCircle:
      return std::make_unique<GaussianMixtureTarget>(make_five_mode_circle(
          section.noise_variance, section.radius, section.component_variance));
    case TargetKind::GaussianMixture: {
      const auto means = parse_vector_rows(section.means, "means");
      const auto cov_rows = parse_vector_rows(section.covariances, "covariances");
      const auto weight_rows = parse_vector_rows(section.weights, "weights");
      if (weight_rows.size() != 1)
        throw ConfigError("target.weights must be a single row");
      const int d = static_cast<int>(means[0].size());
      if (cov_rows.size() != means.size())
        throw ConfigError("target.covariances: need one row per component");
      std::vector<Matrix> covs;
      for (const auto& row : cov_rows) {
        if (row.size() != d * d)
          throw ConfigError("target.covariances: each row needs d*d entries");
        Matrix cov(d, d);
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c) cov(r, c) = row[r * d + c];
        covs.push_back(cov);
      }
      return std::make_unique<GaussianMixtureTarget>(
          means, covs, weight_rows[0], section.noise_variance);
    }
    case TargetKind::Harmonic:
      return std::make_unique<HarmonicTarget>(section.dim, section.curvature,
                                              section.noise_variance);
    case TargetKind::BimodalMean:
      return std::make_unique<MiniBatchModelTarget>(make_bimodal_mean_target(
          section.n_data, section.theta_true, section.lik_sigma,
          section.prior_sigma, section.data_seed, batch_size_nhd));
  }
  throw ConfigError("unknown target kind");
}

std::string canonical_config_string(const RunConfigFile& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "[target]\n";
  const char* kind = "five-mode-circle";
  switch (cfg.target.kind) {
    case TargetKind::FiveModeCircle: kind = "five-mode-circle"; break;
    case TargetKind::GaussianMixture: kind = "gaussian-mixture"; break;
    case TargetKind::Harmonic: kind = "harmonic"; break;
    case TargetKind::BimodalMean: kind = "bimodal-mean"; break;
  }
  os << "kind = " << kind << "\n";
  os << "noise_variance = " << cfg.target.noise_variance << "\n";
  switch (cfg.target.kind) {
    case TargetKind::FiveModeCircle:
      os << "radius = " << cfg.target.radius << "\n";
      os << "component_variance = " << cfg.target.component_variance << "\n";
      break;
    case TargetKind::GaussianMixture:
      os << "means = " << cfg.target.means << "\n";
      os << "covariances = " << cfg.target.covariances << "\n";
      os << "weights = " << cfg.target.weights << "\n";
      break;
    case TargetKind::Harmonic:
      os << "dim = " << cfg.target.dim << "\n";
      os << "curvature = " << cfg.target.curvature << "\n";
      break;
    case TargetKind::BimodalMean:
      os << "n_data = " << cfg.target.n_data << "\n";
      os << "theta_true = " << cfg.target.theta_true << "\n";
      os << "lik_sigma = " << cfg.target.lik_sigma << "\n";
      os << "prior_sigma = " << cfg.target.prior_sigma << "\n";
      os << "data_seed = " << cfg.target.data_seed << "\n";
      break;
  }
  os << "\n[ladder]\n";
  os << "tau = " << cfg.ladder.tau << "\n";
  os << "rungs = " << cfg.ladder.rungs << "\n";
  os << "\n[dynamics]\n";
  os << "epsilon = " << cfg.dynamics.epsilon << "\n";
  os << "c = " << cfg.dynamics.c << "\n";
  os << "traj_len = " << cfg.dynamics.traj_len << "\n";
  os << "batch_size_nhd = " << cfg.dynamics.batch_size_nhd << "\n";
  os << "thermostat_per_dim = " << (cfg.dynamics.thermostat_per_dim ? "true" : "false")
     << "\n";
  os << "\n[exchange]\n";
  os << "sigma2_star = " << cfg.exchange.sigma2_star << "\n";
  os << "lambda = " << cfg.exchange.lambda << "\n";
  os << "n_terms = " << cfg.exchange.n_terms << "\n";
  os << "batch_size_re = " << cfg.exchange.batch_size_re << "\n";
  os << "pair_schedule = "
     << (cfg.exchange.pair_schedule == PairSchedule::EvenOdd ? "even-odd"
                                                             : "random-adjacent")
     << "\n";
  os << "exchange_every = " << cfg.exchange.exchange_every << "\n";
  os << "\n[run]\n";
  os << "iterations = " << cfg.run.iterations << "\n";
  os << "seed = " << cfg.run.seed << "\n";
  os << "burn_in = " << cfg.run.burn_in << "\n";
  os << "output_dir = " << cfg.run.output_dir << "\n";
  os << "checkpoint_every = " << cfg.run.checkpoint_every << "\n";
  os << "trace_thermostat = " << (cfg.run.trace_thermostat ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace renhd
