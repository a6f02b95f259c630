#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace hilsim::csv {

// Shortest decimal that round-trips, so reruns are byte-identical.
inline void append(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline void append(std::string& out, std::int64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline std::string str(double v) {
  std::string s;
  append(s, v);
  return s;
}

}  // namespace hilsim::csv
