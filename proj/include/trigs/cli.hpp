#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace trigs::cli {

/// Exit codes: 0 success, 1 check failure, 2 configuration error.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kConfigError = 2;

/// `args` excludes the program name.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trigs::cli
