#pragma once

#include <string>
#include <vector>

namespace seedbank::cli {

// Experiment runner. Exit codes: 0 success, 1 validation/usage error,
// 2 failed verification (check-generators / compare-laws below threshold).
int run(int argc, const char* const* argv);

// Convenience for tests: args without the program name.
int run(const std::vector<std::string>& args);

}  // namespace seedbank::cli
