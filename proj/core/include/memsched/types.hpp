#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace memsched {

using Cycle = std::uint64_t;
using Addr = std::uint64_t;
using AppId = std::uint32_t;
using ReqId = std::uint64_t;

// Sentinel for "unbounded" counts and thresholds (e.g. a blacklisting
// threshold that can never be reached).
inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

enum class AccessType : std::uint8_t { Read, Write };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: config files, trace files, parameter values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (e.g. issuing to a busy bank).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// The simulator detected an internal inconsistency mid-run.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace memsched
