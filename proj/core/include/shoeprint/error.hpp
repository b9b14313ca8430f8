#pragma once

#include <stdexcept>
#include <string>

namespace shoeprint {

// Error categories map onto CLI exit codes: ConfigError/ShapeError -> 2,
// IoError -> 3, VerificationError -> 1.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace shoeprint
