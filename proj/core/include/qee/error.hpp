#pragma once

#include <stdexcept>
#include <string>

namespace qee {

// Operand shapes that do not fit the operation (non-square, wrong 2N split,
// dimension over the configured maximum).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical precondition failed: non-Hermitian input, invalid density
// matrix, closed-form minor requested outside its regime, ...
class ContractError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The separability tests disagreed with each other. Carries every raw value
// in the message so the failing case can be reproduced.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qee
