// Command-line front end: rank, table, scan, twist.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twodescent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInconsistent = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Prime lists for the four family tables, in print order.
std::vector<long long> table_primes(int id);

}  // namespace twodescent::cli
