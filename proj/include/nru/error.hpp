#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nru {

enum class ErrorCode {
  invalid_geometry,
  domain,
  coverage_infeasible,
  degenerate_cell,
  degenerate_threshold,
  capacity,
  convergence,
  no_offload,
  mapping,
  config,
  control,
  state_space,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library. The stage tag names the pipeline
// stage that produced it ("geometry", "chanstat", ...); empty when the
// error was raised outside the end-to-end evaluation.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::string stage = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  // True for failures a caller can only fix by changing inputs (exit 2 in the CLI).
  bool is_config_error() const noexcept { return code_ == ErrorCode::config; }

  Error with_stage(std::string stage) const;

 private:
  ErrorCode code_;
  std::string stage_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) fail(code, what);
}

}  // namespace nru
