#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nru/config.hpp"

namespace nru::cli {

enum class CheckStatus { pass, fail, skip };

struct CheckRow {
  std::string stage;
  std::string check;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::fail;
};

const char* to_string(CheckStatus s) noexcept;

// Analytical stages against their oracles at the configured density and at
// the most loaded sweep density.
std::vector<CheckRow> run_validation(const RunConfig& cfg);
void write_validation_csv(std::ostream& out, const std::vector<CheckRow>& rows);

}  // namespace nru::cli
