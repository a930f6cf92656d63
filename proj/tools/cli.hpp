#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tetmf::cli {

enum ExitCode { Ok = 0, RuntimeFailure = 1, Usage = 2, NumericalFailure = 3 };

/// Runs the command line args (without the program name), writing results
/// to out and diagnostics to err. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a of s as 16 hex digits.
std::string fnv1a_hex(const std::string& s);

}  // namespace tetmf::cli
