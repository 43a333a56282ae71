#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nru/pipeline.hpp"

namespace nru {

// One CSV row: the sweep coordinates plus the report.
struct ReportRow {
  double min_rate_bps = 0.0;
  unsigned cw_nru = 0;
  StrategyReport report;
};

// Fixed column order, 12 significant digits, LF line ends.
const std::vector<std::string>& report_columns();
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);
std::string format_number(double v);

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::uintmax_t bytes = 0;
  std::string sha256;
};

std::string sha256_hex(const std::string& bytes);
ManifestEntry describe_file(const std::string& dir, const std::string& relative_path);

struct RunManifest {
  std::string config_path;
  std::string subcommand;
  std::string output_dir;
  std::string seed_override;  // empty when --seed was not given
  std::vector<ManifestEntry> files;
};

void write_manifest(std::ostream& out, const RunManifest& m);

}  // namespace nru
