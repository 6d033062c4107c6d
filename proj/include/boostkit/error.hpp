#pragma once

#include <stdexcept>
#include <string>

namespace boostkit {

// Each error class maps onto one CLI exit code (see cli.hpp).

/// Bad flags, bad configuration, or an API call that violates a precondition.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that cannot be loaded or does not meet a dataset invariant.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant failed; indicates a bug rather than bad input.
class InvariantError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace boostkit
