#pragma once

#include <stdexcept>
#include <string>

namespace clickbait {

// Bad argument to a pure operation (dimension mismatch, k out of range, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidTrainingSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Metric requested on a set that lacks one of the two classes.
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class LoadErrorKind { bad_magic, truncated, version_mismatch, malformed, io };

inline const char* to_string(LoadErrorKind kind) {
  switch (kind) {
    case LoadErrorKind::bad_magic: return "bad_magic";
    case LoadErrorKind::truncated: return "truncated";
    case LoadErrorKind::version_mismatch: return "version_mismatch";
    case LoadErrorKind::malformed: return "malformed";
    case LoadErrorKind::io: return "io";
  }
  return "unknown";
}

class LoadError : public std::runtime_error {
 public:
  LoadError(LoadErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  LoadErrorKind kind() const noexcept { return kind_; }

 private:
  LoadErrorKind kind_;
};

class StorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConflictError : public StorageError {
 public:
  using StorageError::StorageError;
};

class NotFoundError : public StorageError {
 public:
  using StorageError::StorageError;
};

}  // namespace clickbait
