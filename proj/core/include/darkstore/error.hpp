#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace darkstore {

enum class ErrorCode {
  invalid_parameter,
  degenerate_edge,
  empty_field,
  out_of_bounds,
  seeding_failed,
  limit_violation,
  state_mismatch,
  empty_mesh,
  parse_error,
  config_error,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace darkstore
