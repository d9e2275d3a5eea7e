#pragma once

#include <stdexcept>
#include <string>

namespace seqec {

/// Raised when a caller breaks an operation's precondition (bad sizes,
/// stale indices, out-of-range values).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed user input: map files, config files, CSV inputs.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace seqec
