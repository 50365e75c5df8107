#pragma once

#include <stdexcept>
#include <string>

namespace opsel {

// Bad user input: parameters, flags, ranges. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Bad or unusable data: missing files, parse failures, broken invariants
// in loaded content. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace opsel
