#pragma once

#include "renhd/diagnostics.hpp"
#include "renhd/exchange.hpp"
#include "renhd/types.hpp"

#include <string>
#include <vector>

namespace renhd {

/// samples.csv with header "iter,theta_0,..." and 17-significant-digit floats
/// so a read-back is bit-stable.
void write_samples_csv(const std::string& path, const std::vector<Vector>& samples);

/// Throws IoError naming the first malformed row.
std::vector<Vector> read_samples_csv(const std::string& path);

/// One JSON object per line: phase, pair, delta estimate, variance, batch
/// size, draws, decision.
void write_attempts_jsonl(const std::string& path,
                          const std::vector<ExchangeAttempt>& attempts);
std::vector<ExchangeAttempt> read_attempts_jsonl(const std::string& path);

void write_report_json(const std::string& path, const DiagnosticsReport& report);

/// Plot-ready grid dump: one row per cell with center coordinates, empirical
/// and analytic masses.
void write_histogram_csv(const std::string& path, const GridSpec& grid,
                         const Vector& empirical, const Vector& analytic);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace renhd
