#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace condorcet {

/// Runs the command line `args` (without the program name). Returns the exit
/// code: 0 on success, 2 on invalid input, 3 when a computation fails.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// CSV header written by every command that emits rows.
inline constexpr const char* kCsvHeader = "n,method,value,log_value,stderr,dominant_term,parity";

}  // namespace condorcet
