#pragma once

#include <string>
#include <vector>

namespace gpmisspec::cli {

struct SelftestCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Small embedded invariant suite; a few seconds on one core.
[[nodiscard]] std::vector<SelftestCheck> run_selftest();

}  // namespace gpmisspec::cli
