#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gasd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (non-positive depth, shape
/// mismatch, asymmetric matrix, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A file did not have the expected layout (bit depth, channel count, magic).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A value cannot be represented in the target encoding.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A key-value file is missing a key or holds a malformed value.
class ParseError : public Error {
 public:
  ParseError(std::string key, const std::string& what)
      : Error(what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// More samples were requested than the eligible support can provide.
class InfeasibleSample : public Error {
 public:
  using Error::Error;
};

/// A sample index refers to a pixel without valid source depth.
class InvalidSample : public Error {
 public:
  using Error::Error;
};

}  // namespace gasd
