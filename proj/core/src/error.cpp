#include "darkstore/error.hpp"

namespace darkstore {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::degenerate_edge: return "degenerate-edge";
    case ErrorCode::empty_field: return "empty-field";
    case ErrorCode::out_of_bounds: return "out-of-bounds";
    case ErrorCode::seeding_failed: return "seeding-failed";
    case ErrorCode::limit_violation: return "limit-violation";
    case ErrorCode::state_mismatch: return "state-mismatch";
    case ErrorCode::empty_mesh: return "empty-mesh";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::config_error: return "config-error";
  }
  return "unknown";
}

}  // namespace darkstore
