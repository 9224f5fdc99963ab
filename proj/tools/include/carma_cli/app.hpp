#pragma once

#include <ostream>

#include "carma/error.hpp"

namespace carma::cli {

/// 2: config/parameter errors, 3: inadmissible or singular model,
/// 4: numeric budget failures, 1: anything else.
int exit_code_for(ErrorCode code);

/// Full command-line entry point; returns the process exit status.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace carma::cli
