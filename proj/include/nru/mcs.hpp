#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nru {

struct McsRow {
  double sinr_threshold_db = 0.0;
  double spectral_efficiency = 0.0;  // bit/s/Hz
};

// Ordered SINR -> spectral-efficiency switching table.
//
// Text format: one row per MCS, two whitespace-separated columns
// (threshold dB, efficiency bit/s/Hz); '#' starts a comment.
class McsTable {
 public:
  McsTable() = default;
  explicit McsTable(std::vector<McsRow> rows);

  static McsTable parse(std::istream& in, const std::string& source = "<stream>");
  static McsTable load(const std::string& path);
  static McsTable single(double threshold_db, double efficiency);

  const std::vector<McsRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  double outage_threshold_db() const noexcept { return rows_.front().sinr_threshold_db; }

  // Efficiency of the highest row whose threshold is <= sinr_db; 0 in outage.
  double efficiency_at(double sinr_db) const noexcept;

  void write(std::ostream& out) const;

 private:
  std::vector<McsRow> rows_;
};

}  // namespace nru
