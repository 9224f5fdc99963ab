#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace carma {

/// Failure categories. The CLI maps these onto its exit-code taxonomy.
enum class ErrorCode {
  config,                    // malformed or inconsistent input files
  invalid_parameter,         // parameter outside its allowed range
  shape_mismatch,            // array/matrix dimensions disagree
  unsupported_model,         // operation not available for this driver family
  inadmissible_model,        // det P has a zero on (or too close to) the imaginary axis
  singular_solve,            // P(i mu) numerically singular
  degenerate_interpolation,  // det P coefficient recovery failed its conditioning check
  contour_quadrature,        // Laurent circle quadrature failed its consistency check
  tolerance_not_achievable,  // requested tolerance below the achievable truncation error
  truncation_budget,         // frequency/space truncation exceeds the allowed budget
  history_truncation,        // simulated history too short for the kernel decay
  overflow,                  // matrix exponential argument too large
  quadrature,                // adaptive quadrature did not meet its tolerance
  insufficient_samples,      // too few samples for an estimator
  internal,
};

std::string_view to_string(ErrorCode code);

/// True for the categories that indicate a numerical budget or accuracy failure.
bool is_numeric_failure(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace carma
