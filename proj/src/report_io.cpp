#include "nru/report_io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>

#include "nru/error.hpp"

namespace nru {

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {
      "strategy",          "bs_density",        "min_rate_bps",     "cw_nru",           "threshold",
      "r_nru",             "r_wigig",           "resources",        "servers",          "lambda",
      "lambda1",           "lambda2",           "lambda_wigig",     "lambda_su",        "pi_direct",
      "pi_sl",             "pi_su",             "success_nru",      "success_wigig",    "collision_nru",
      "mean_rate_nru",     "mean_rate_wigig",   "q_su",             "q_s",              "mean_demand_type1",
      "mean_demand_type2", "infeasible_type1",  "infeasible_type2", "unlicensed_blockage",
      "fixed_point_iterations", "truncated_mass"};
  return cols;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& row : rows) {
    const StrategyReport& r = row.report;
    const std::string threshold = r.threshold == kInfiniteThreshold ? "inf" : std::to_string(r.threshold);
    const double values[] = {r.r_nru,
                             r.r_wigig,
                             static_cast<double>(r.resources),
                             static_cast<double>(r.servers),
                             r.arrivals.lambda,
                             r.arrivals.lambda1,
                             r.arrivals.lambda2,
                             r.arrivals.lambda_wigig,
                             r.lambda_su,
                             r.pi_direct,
                             r.pi_sl,
                             r.pi_su,
                             r.success_nru,
                             r.success_wigig,
                             r.collision_nru,
                             r.mean_rate_nru,
                             r.mean_rate_wigig,
                             r.q_su,
                             r.q_s,
                             r.mean_demand_type1,
                             r.mean_demand_type2,
                             r.infeasible_type1,
                             r.infeasible_type2,
                             r.unlicensed_blockage,
                             static_cast<double>(r.fixed_point_iterations),
                             r.truncated_mass};
    out << to_string(r.strategy) << ',' << format_number(r.bs_density) << ',' << format_number(row.min_rate_bps)
        << ',' << row.cw_nru << ',' << threshold;
    for (double v : values) out << ',' << format_number(v);
    out << '\n';
  }
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::control, "SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

ManifestEntry describe_file(const std::string& dir, const std::string& relative_path) {
  const auto full = std::filesystem::path(dir) / relative_path;
  std::ifstream in(full, std::ios::binary);
  if (!in) fail(ErrorCode::config, "cannot read emitted file '" + full.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return {relative_path, bytes.size(), sha256_hex(bytes)};
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "# config " << m.config_path << '\n';
  out << "# subcommand " << m.subcommand << '\n';
  out << "# output " << m.output_dir << '\n';
  out << "# seed " << (m.seed_override.empty() ? "config" : m.seed_override) << '\n';
  for (const auto& f : m.files) out << f.path << ' ' << f.bytes << ' ' << f.sha256 << '\n';
}

}  // namespace nru
