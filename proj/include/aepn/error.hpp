#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aepn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax error in an expression or pattern; position is a byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        detail_(message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& detail() const noexcept { return detail_; }
  // Same error with a location prefix such as "transitions.Start.guard".
  ParseError in(const std::string& where) const { return ParseError(where + ": " + detail_, position_); }

 private:
  std::string detail_;
  std::size_t position_;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class InsufficientTokens : public Error {
 public:
  using Error::Error;
};

class NotFireable : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened or read.
class IoError : public Error {
 public:
  using Error::Error;
};

class LivelockError : public Error {
 public:
  using Error::Error;
};

// A caller broke an API precondition (masked action, empty mask, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace aepn
