#include "renhd/io.hpp"

#include <nlohmann/json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace renhd {

namespace {
using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void write_samples_csv(const std::string& path, const std::vector<Vector>& samples) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  const int d = samples.empty() ? 0 : static_cast<int>(samples[0].size());
  os << "iter";
  for (int c = 0; c < d; ++c) os << ",theta_" << c;
  os << "\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    os << i;
    for (int c = 0; c < d; ++c) os << ',' << format_double(samples[i][c]);
    os << "\n";
  }
  if (!os) throw IoError("write failed: " + path);
}

std::vector<Vector> read_samples_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open samples file: " + path);
  std::string line;
  if (!std::getline(is, line))
    throw IoError(path + ":1: missing header row");
  int d = 0;
  {
    std::stringstream header(line);
    std::string field;
    bool first = true;
    while (std::getline(header, field, ',')) {
      if (first) {
        if (field != "iter") throw IoError(path + ":1: header must start with 'iter'");
        first = false;
      } else {
        ++d;
      }
    }
    if (d < 1) throw IoError(path + ":1: no theta columns in header");
  }
  std::vector<Vector> samples;
  int row_no = 1;
  while (std::getline(is, line)) {
    ++row_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    if (!std::getline(row, field, ','))
      throw IoError(path + ":" + std::to_string(row_no) + ": empty row");
    Vector sample(d);
    for (int c = 0; c < d; ++c) {
      if (!std::getline(row, field, ','))
        throw IoError(path + ":" + std::to_string(row_no) +
                      ": truncated row (expected " + std::to_string(d + 1) +
                      " fields)");
      try {
        std::size_t used = 0;
        sample[c] = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(row_no) +
                      ": bad number '" + field + "'");
      }
    }
    if (std::getline(row, field, ','))
      throw IoError(path + ":" + std::to_string(row_no) + ": extra fields");
    samples.push_back(std::move(sample));
  }
  return samples;
}

void write_attempts_jsonl(const std::string& path,
                          const std::vector<ExchangeAttempt>& attempts) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  for (const auto& a : attempts) {
    json row = {{"phase", a.phase},
                {"pair", {a.j, a.k}},
                {"delta_e", a.delta_e},
                {"var", a.var_estimate},
                {"batch_used", a.batch_used},
                {"accepted", a.accepted},
                {"z_c", a.z_c},
                {"z_n_star", a.z_n_star}};
    os << row.dump() << "\n";
  }
  if (!os) throw IoError("write failed: " + path);
}

std::vector<ExchangeAttempt> read_attempts_jsonl(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open attempts file: " + path);
  std::vector<ExchangeAttempt> attempts;
  std::string line;
  int row_no = 0;
  while (std::getline(is, line)) {
    ++row_no;
    if (line.empty()) continue;
    json row;
    try {
      row = json::parse(line);
      ExchangeAttempt a;
      a.phase = row.at("phase").get<int>();
      a.j = row.at("pair").at(0).get<int>();
      a.k = row.at("pair").at(1).get<int>();
      a.delta_e = row.at("delta_e").get<double>();
      a.var_estimate = row.at("var").get<double>();
      a.batch_used = row.at("batch_used").get<int>();
      a.accepted = row.at("accepted").get<bool>();
      a.z_c = row.at("z_c").get<double>();
      a.z_n_star = row.at("z_n_star").get<double>();
      attempts.push_back(a);
    } catch (const json::exception& err) {
      throw IoError(path + ":" + std::to_string(row_no) + ": " + err.what());
    }
  }
  return attempts;
}

void write_report_json(const std::string& path, const DiagnosticsReport& report) {
  json out;
  if (report.ess >= 0.0)
    out["ess"] = report.ess;
  else
    out["ess"] = nullptr;
  if (report.tv_distance >= 0.0) out["tv_distance"] = report.tv_distance;
  out["mode_weights"] = std::vector<double>(
      report.mode_weights.data(), report.mode_weights.data() + report.mode_weights.size());
  out["acceptance_by_pair"] =
      std::vector<double>(report.acceptance_by_pair.data(),
                          report.acceptance_by_pair.data() + report.acceptance_by_pair.size());
  out["acceptance_overall"] = report.acceptance_overall;
  out["sample_count"] = report.sample_count;
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << out.dump(2) << "\n";
  if (!os) throw IoError("write failed: " + path);
}

void write_histogram_csv(const std::string& path, const GridSpec& grid,
                         const Vector& empirical, const Vector& analytic) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "x,y,empirical,analytic\n";
  const double wx = (grid.x_hi - grid.x_lo) / grid.nx;
  const double wy = (grid.y_hi - grid.y_lo) / grid.ny;
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const int cell = iy * grid.nx + ix;
      os << format_double(grid.x_lo + (ix + 0.5) * wx) << ','
         << format_double(grid.y_lo + (iy + 0.5) * wy) << ','
         << format_double(empirical[cell]) << ',' << format_double(analytic[cell])
         << "\n";
    }
  }
  if (!os) throw IoError("write failed: " + path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << content;
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace renhd
