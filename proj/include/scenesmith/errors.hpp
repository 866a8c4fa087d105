#pragma once

#include <stdexcept>
#include <string>

namespace scenesmith {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or missing field in a structured-text input. `path()` names the field,
/// e.g. `walls[2].openings[0].top`.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class UnknownCategoryError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class DanglingTypeError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class NoEnclosureError : public Error {
 public:
  using Error::Error;
};

class EmptyPaletteError : public Error {
 public:
  using Error::Error;
};

class UnreachableTargetError : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

class UnknownCoefficientError : public Error {
 public:
  using Error::Error;
};

}  // namespace scenesmith
