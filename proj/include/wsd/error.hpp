#pragma once

#include <stdexcept>
#include <string>

namespace wsd {

// Bad user input: malformed files, missing paths, invalid configuration.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure during training (non-finite loss or parameters).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wsd
