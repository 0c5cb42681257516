#pragma once

#include <stdexcept>
#include <string>

namespace ngfreg {

/// Precondition violation by the caller (bad sizes, non-finite values, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Image has no positive mass, so a center of mass is undefined.
class DegenerateMass : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read, written or decoded.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file content (config, landmarks, manifests, containers).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ngfreg
