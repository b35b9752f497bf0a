#pragma once
// Small text-output helpers. All numeric output goes through %.17g so runs
// are reproducible byte for byte.

#include <cstdio>
#include <string>
#include <vector>

namespace foldcycle {

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

}  // namespace foldcycle
