#pragma once

#include <stdexcept>
#include <string>

namespace vgpnn {

// Bad input data: malformed files, inconsistent shapes coming from disk,
// failed pipeline preconditions on user data. The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad command-line usage or configuration. The CLI maps it to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vgpnn
