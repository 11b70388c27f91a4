// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vislink {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Raised by normalize() when the input contains NaN or Inf.
class NonFiniteError : public Error {
 public:
  explicit NonFiniteError(std::size_t index)
      : Error("non-finite value at index " + std::to_string(index)), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  UnsupportedError(const std::string& what, std::string descriptor)
      : Error(what + ": " + descriptor), descriptor_(std::move(descriptor)) {}
  const std::string& descriptor() const noexcept { return descriptor_; }

 private:
  std::string descriptor_;
};

class SizeError : public Error {
 public:
  SizeError(std::size_t expected, std::size_t actual)
      : Error("size mismatch: expected " + std::to_string(expected) + " bytes, got " +
              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}
  SizeError(const std::string& what, std::size_t expected, std::size_t actual)
      : Error(what + ": expected " + std::to_string(expected) + ", got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class EmptyArchiveError : public Error {
 public:
  using Error::Error;
};

/// Parse failure tied to a 1-based line or row number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IndexError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Malformed or out-of-order wire data on a broker or peer connection.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Transport failure: unreachable endpoint, refused connection, timeout.
class NetworkError : public Error {
 public:
  using Error::Error;
};

class JoinError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace vislink
