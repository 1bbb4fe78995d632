#pragma once

#include <stdexcept>
#include <string>

namespace bellmem {

/// Malformed or out-of-range user input. Maps to CLI exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request that exceeds a configured resource cap (e.g. enumeration size).
/// Also maps to exit code 2.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal contract was broken: a strategy read beyond its memory class,
/// a supposedly local model signalled, counts disagreed with a recount.
/// Maps to exit code 1.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace bellmem
