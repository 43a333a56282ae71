#include "nru/mcs.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "nru/error.hpp"

namespace nru {

McsTable::McsTable(std::vector<McsRow> rows) : rows_(std::move(rows)) {
  require(!rows_.empty(), ErrorCode::config, "MCS table is empty");
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    require(rows_[i].sinr_threshold_db > rows_[i - 1].sinr_threshold_db, ErrorCode::config,
            "MCS thresholds must be strictly increasing");
    require(rows_[i].spectral_efficiency > rows_[i - 1].spectral_efficiency, ErrorCode::config,
            "MCS efficiencies must be strictly increasing");
  }
  require(rows_.front().spectral_efficiency > 0.0, ErrorCode::config, "MCS efficiencies must be positive");
}

McsTable McsTable::parse(std::istream& in, const std::string& source) {
  std::vector<McsRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    McsRow row;
    if (!(fields >> row.sinr_threshold_db)) continue;  // blank or comment-only
    std::string extra;
    if (!(fields >> row.spectral_efficiency) || (fields >> extra))
      fail(ErrorCode::config, source + ":" + std::to_string(lineno) + ": expected two numeric columns");
    rows.push_back(row);
  }
  return McsTable(std::move(rows));
}

McsTable McsTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot open MCS table '" + path + "'");
  return parse(in, path);
}

McsTable McsTable::single(double threshold_db, double efficiency) {
  return McsTable({McsRow{threshold_db, efficiency}});
}

double McsTable::efficiency_at(double sinr_db) const noexcept {
  double eff = 0.0;
  for (const auto& row : rows_) {
    if (row.sinr_threshold_db > sinr_db) break;
    eff = row.spectral_efficiency;
  }
  return eff;
}

void McsTable::write(std::ostream& out) const {
  out << "# threshold_db  efficiency\n";
  for (const auto& row : rows_)
    out << std::setprecision(12) << row.sinr_threshold_db << ' ' << row.spectral_efficiency << '\n';
}

}  // namespace nru
