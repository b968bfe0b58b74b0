#ifndef SCIDETECT_ERROR_H_
#define SCIDETECT_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scidetect {

// Violated precondition or invariant on well-formed input. CLI exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing/unreadable/unwritable file. CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input at a known position (1-based line, or byte offset when
// line is 0).
class ParseError : public DomainError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset = 0)
      : DomainError(what), line_(line), offset_(offset) {}
  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

// A single request field is out of range. Surfaced as HTTP 422.
class ValidationError : public DomainError {
 public:
  ValidationError(std::string field, const std::string& what)
      : DomainError(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Unknown entity (excerpt, model, session). Surfaced as HTTP 404.
class NotFoundError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Operation not allowed in the current workflow stage. Surfaced as HTTP 409.
class StageError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Persisted file written by an unsupported format version.
class VersionError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace scidetect

#endif  // SCIDETECT_ERROR_H_
