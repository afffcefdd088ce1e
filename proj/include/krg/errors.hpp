#pragma once

#include <stdexcept>
#include <string>

namespace krg {

// Error taxonomy mirrored by the CLI exit codes: input 2, numeric 3,
// resource 4.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace krg
