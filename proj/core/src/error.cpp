#include "carma/error.hpp"

namespace carma {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::config: return "config";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::unsupported_model: return "unsupported-model";
    case ErrorCode::inadmissible_model: return "inadmissible-model";
    case ErrorCode::singular_solve: return "singular-solve";
    case ErrorCode::degenerate_interpolation: return "degenerate-interpolation";
    case ErrorCode::contour_quadrature: return "contour-quadrature";
    case ErrorCode::tolerance_not_achievable: return "tolerance-not-achievable";
    case ErrorCode::truncation_budget: return "truncation-budget";
    case ErrorCode::history_truncation: return "history-truncation";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::quadrature: return "quadrature";
    case ErrorCode::insufficient_samples: return "insufficient-samples";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

bool is_numeric_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::degenerate_interpolation:
    case ErrorCode::contour_quadrature:
    case ErrorCode::tolerance_not_achievable:
    case ErrorCode::truncation_budget:
    case ErrorCode::history_truncation:
    case ErrorCode::overflow:
    case ErrorCode::quadrature:
    case ErrorCode::insufficient_samples:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace carma
