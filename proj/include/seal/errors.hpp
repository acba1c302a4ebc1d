#pragma once

#include <stdexcept>
#include <string>

namespace seal {

// Invalid arguments, malformed configs, inconsistent dimensions.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem and serialization failures (bad magic, truncation, checksum).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace seal
