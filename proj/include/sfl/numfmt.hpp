#pragma once

#include <cstdio>
#include <string>

namespace sfl {

/// Round-trip precision for data files.
inline std::string fmt_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Display precision for reports (6 significant digits).
inline std::string fmt_sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace sfl
