#pragma once

#include <stdexcept>
#include <string>

namespace harvest {

/// Invalid user-facing configuration (bad alpha, k > p, unknown enum value).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that cannot be used: unreadable file, unparsable cell, bad outcome.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed in a way that cannot be recovered locally.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace harvest
