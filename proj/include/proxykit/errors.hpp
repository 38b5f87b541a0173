#pragma once

#include <stdexcept>
#include <string>

namespace proxykit {

/// Base of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed JSON or a document that does not match the schema.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A layout invariant is violated. `entity()` names the offending entity
/// (e.g. "object 3", "room 0", "connector 100").
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::string entity)
      : Error(what + " (" + entity + ")"), reason_(what), entity_(std::move(entity)) {}

  const std::string& reason() const { return reason_; }
  const std::string& entity() const { return entity_; }

 private:
  std::string reason_;
  std::string entity_;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class ExpansionError : public Error {
 public:
  using Error::Error;
};

class UnknownId : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class DegenerateRoom : public Error {
 public:
  using Error::Error;
};

class NoValidPoses : public Error {
 public:
  using Error::Error;
};

class OracleFailure : public Error {
 public:
  OracleFailure(const std::string& what, double theta)
      : Error(what + " (theta=" + std::to_string(theta) + ")"), theta_(theta) {}
  double theta() const { return theta_; }

 private:
  double theta_;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyOverlap : public Error {
 public:
  using Error::Error;
};

class EmptyReference : public Error {
 public:
  using Error::Error;
};

}  // namespace proxykit
