#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gpmisspec::cli {

/// Runs one command. `args` excludes the program name.
/// Returns 0 on success, 1 on numeric or I/O failure, 2 on usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One finite value per line; blank lines and lines starting with '#' are skipped.
[[nodiscard]] std::vector<double> read_values(const std::string& path);
void write_values(const std::vector<double>& values, const std::string& path);

/// FNV-1a 64 of the file bytes, as 16 hex digits.
[[nodiscard]] std::string file_digest(const std::string& path);

}  // namespace gpmisspec::cli
