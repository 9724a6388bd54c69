#pragma once

#include <stdexcept>
#include <string>

namespace tewa {

// Root of every error the engine raises. Callers that only care about
// "something in tewa failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidHistory : public Error {
 public:
  using Error::Error;
};

class MissingCorrelation : public Error {
 public:
  using Error::Error;
};

class OutOfRangeValue : public Error {
 public:
  using Error::Error;
};

class DuplicateClassId : public Error {
 public:
  using Error::Error;
};

class UnknownWeaponClass : public Error {
 public:
  using Error::Error;
};

// Raised when a schedule breaks the capacity or lock rules. Reaching this from
// the assignment pass means the pass itself is wrong.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

class ScenarioInvalid : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::string field)
      : Error(what), line_(line), field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

class CorruptTrace : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace tewa
