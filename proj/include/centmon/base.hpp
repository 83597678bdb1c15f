#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace centmon {

/// Carrier elements are small integers in [0, k).  Released builds support
/// carrier sizes 3 and 4 only; larger domains blow the fixed-capacity
/// containers used throughout.
using Element = std::uint8_t;

inline constexpr int kMinCarrier = 3;
inline constexpr int kMaxCarrier = 4;
inline constexpr int kMaxSigma = 24;   // k(k-1)(k-2) at k = 4
inline constexpr int kMaxUnary = 256;  // k^k at k = 4

constexpr std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  while (exp--) r *= base;
  return r;
}

inline void check_carrier(int k) {
  if (k < kMinCarrier || k > kMaxCarrier)
    throw std::out_of_range("carrier size must be 3 or 4, got " +
                            std::to_string(k));
}

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two operands built over different carrier sizes were combined.
class config_error : public error {
 public:
  using error::error;
};

class parse_error : public error {
 public:
  parse_error(const std::string& what, int line)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A persisted artifact fails its checksum or internal consistency check.
class integrity_error : public error {
 public:
  using error::error;
};

/// A pipeline step was invoked before the artifacts it consumes exist.
class dependency_error : public error {
 public:
  using error::error;
};

}  // namespace centmon
