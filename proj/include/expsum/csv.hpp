#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

namespace expsum::csv {

/// Fixed float format used in all output: %.12e, with nan/inf spelled out.
inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

inline std::string num(long long x) { return std::to_string(x); }
inline std::string num(long x) { return std::to_string(x); }
inline std::string num(int x) { return std::to_string(x); }
inline std::string num(unsigned x) { return std::to_string(x); }
inline std::string flag(bool b) { return b ? "1" : "0"; }

inline std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

}  // namespace expsum::csv
