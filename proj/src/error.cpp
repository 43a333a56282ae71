#include "nru/error.hpp"

namespace nru {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_geometry: return "invalid-geometry";
    case ErrorCode::domain: return "domain";
    case ErrorCode::coverage_infeasible: return "coverage-infeasible";
    case ErrorCode::degenerate_cell: return "degenerate-cell";
    case ErrorCode::degenerate_threshold: return "degenerate-threshold";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::no_offload: return "no-offload";
    case ErrorCode::mapping: return "mapping";
    case ErrorCode::config: return "config";
    case ErrorCode::control: return "control";
    case ErrorCode::state_space: return "state-space";
  }
  return "unknown";
}

namespace {
std::string format_message(ErrorCode code, const std::string& what, const std::string& stage) {
  std::string msg;
  if (!stage.empty()) msg += "[" + stage + "] ";
  msg += std::string(to_string(code)) + ": " + what;
  return msg;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& what, std::string stage)
    : std::runtime_error(format_message(code, what, stage)), code_(code), stage_(std::move(stage)) {}

Error Error::with_stage(std::string stage) const {
  // Strip any previous prefix so re-tagging does not nest.
  std::string what = runtime_error::what();
  const auto pos = what.find(": ");
  std::string body = pos == std::string::npos ? what : what.substr(pos + 2);
  return Error(code_, body, std::move(stage));
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace nru
