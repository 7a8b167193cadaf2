// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace deshadow::cli {

/// Bad flags or flag values; maps to kUsage.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Runs one subcommand. `args` excludes the program name. Diagnostics go to
/// `err` with an "error[usage|data|numerical]: " prefix.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Rewrites "--config <file>" into the flags it lists. File lines are
/// "key = value" ("#" starts a comment, "[section]" lines are ignored); flags
/// given explicitly on the command line win over the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace deshadow::cli
