// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EEGSEP_COMMON_ERROR_H_
#define EEGSEP_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace eegsep {

// Base for all recoverable failures raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/array shapes do not agree.
class DimError : public Error {
 public:
  explicit DimError(const std::string& msg) : Error(msg) {}
};

// A signal or sequence is too short (or empty) for the requested op.
class LengthError : public Error {
 public:
  explicit LengthError(const std::string& msg) : Error(msg) {}
};

// Invalid configuration values (fs, band edges, fractions, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed file contents (WAV header, EEG container, checkpoint, ...).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// Numeric contract violation (non-finite values, zero reference, ...).
class ValueError : public Error {
 public:
  explicit ValueError(const std::string& msg) : Error(msg) {}
};

}  // namespace eegsep

#endif  // EEGSEP_COMMON_ERROR_H_
