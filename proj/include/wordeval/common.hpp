#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wordeval {

// Broad failure categories; the C API and the CLI exit codes map onto these.
enum class ErrorKind {
  Io,       // unreadable or unwritable file
  Parse,    // malformed input data
  Invalid,  // bad argument, config or precondition
  Eval,     // evaluator cannot produce a score (e.g. nothing usable)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Whether larger values of a metric mean a better model.
enum class Direction { HigherBetter, LowerBetter };

inline const char* direction_name(Direction d) {
  return d == Direction::HigherBetter ? "higher-better" : "lower-better";
}

// Shortest representation that round-trips a double exactly. Used for all
// CSV output so that report bytes are stable across runs.
std::string format_double(double value);

// FNV-1a over raw bytes; used for config hashes in run manifests.
std::uint64_t fnv1a_hash(const std::string& bytes);

}  // namespace wordeval
