// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EEGSEP_COMMON_TEXT_H_
#define EEGSEP_COMMON_TEXT_H_

#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

namespace eegsep {

inline std::string strprintf(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  va_list ap2;
  va_copy(ap2, ap);
  int n = std::vsnprintf(nullptr, 0, fmt, ap);
  va_end(ap);
  std::string out(n > 0 ? static_cast<size_t>(n) : 0, '\0');
  if (n > 0) std::vsnprintf(out.data(), out.size() + 1, fmt, ap2);
  va_end(ap2);
  return out;
}

std::vector<std::string> split_ws(const std::string& line);
std::vector<std::string> split_on(const std::string& s, char sep);
std::string trim(const std::string& s);
std::string lower(const std::string& s);

// Round-trip exact decimal for doubles (%.17g) used in traces and reports.
std::string fmt_full(double v);

}  // namespace eegsep

#endif  // EEGSEP_COMMON_TEXT_H_
