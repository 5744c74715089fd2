// Error taxonomy and small shared helpers.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace c2v {

// Bad flags, bad shapes, contract violations by the caller.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data (corpus, datasets, model files).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values where finite ones are required.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Model-file specific failures, kept distinct so callers can tell them apart.
class FormatError : public DataError {
 public:
  explicit FormatError(const std::string& msg) : DataError(msg) {}
};
class VersionError : public DataError {
 public:
  explicit VersionError(const std::string& msg) : DataError(msg) {}
};
class ChecksumError : public DataError {
 public:
  explicit ChecksumError(const std::string& msg) : DataError(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

inline bool is_finite(double x) { return std::isfinite(x); }

}  // namespace c2v
