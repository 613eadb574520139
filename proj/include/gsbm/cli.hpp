#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

namespace gsbm::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kVerificationFailure = 3;
inline constexpr int kBudgetExceeded = 4;

// Runs gsbm_lab with the given arguments (argv[0] is the program name).
// Reports go to --out when given, otherwise to out; diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Copy of a report with the top-level "timestamp" field removed.
nlohmann::json without_timestamp(nlohmann::json report);

}  // namespace gsbm::cli
