#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace champ {

// Root of every error the library raises. The CLI maps any Error to exit
// status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed drive-log row. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Corrupt map, advisory, or ground-truth file.
class FormatError : public Error {
 public:
  using Error::Error;
};

class CoincidentPoints : public Error {
 public:
  CoincidentPoints() : Error("bearing undefined between coincident points") {}
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class NoNodes : public Error {
 public:
  NoNodes() : Error("nearest-neighbor query on an empty node set") {}
};

class RadiusMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class ClipMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace champ
