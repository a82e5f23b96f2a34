#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edgeprov {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument or precondition violation (value out of range, size mismatch).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Invalid or inconsistent configuration input.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A structural invariant of the model was broken (capacity exceeded,
/// double destroy, inconsistent bookkeeping).
class InvariantError : public Error {
public:
  using Error::Error;
};

/// Input is well formed but semantically invalid.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Malformed input document; carries the byte offset of the failure.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what + " (byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
  std::size_t byte_offset_ = 0;
};

}  // namespace edgeprov
