#include "wordeval/common.hpp"

#include <charconv>
#include <cstdio>

namespace wordeval {

std::string format_double(double value) {
  char buf[40];
  // %.17g always round-trips; try shorter forms first for readable output.
  for (int precision = 1; precision <= 17; ++precision) {
    int len = std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    double parsed = 0.0;
    auto [ptr, ec] = std::from_chars(buf, buf + len, parsed);
    if (ec == std::errc() && ptr == buf + len && parsed == value) {
      return std::string(buf, static_cast<std::size_t>(len));
    }
  }
  int len = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace wordeval
