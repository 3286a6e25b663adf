#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridplan {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A load case or overlay references an element key that does not exist.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or incomplete configuration (missing slack, AL without coordinates, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// The base data admits no connected or convergent switching state.
class InfeasibilityError : public Error {
 public:
  using Error::Error;
};

/// Degenerate point sets handed to the triangulation.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation called in a state where it is not defined.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration refused because the catalog exceeds the safety cap.
class RefusalError : public Error {
 public:
  using Error::Error;
};

/// A heuristic could not obtain any starting candidate.
class InitializationError : public Error {
 public:
  using Error::Error;
};

/// Grid data failed structural validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document. `offset` is the byte position when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset = 0) : Error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// File system failure, message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridplan
