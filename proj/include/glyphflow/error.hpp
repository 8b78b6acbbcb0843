#pragma once

#include <stdexcept>
#include <string>

namespace glyphflow {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric argument outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Mismatched or invalid dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class AnnotationError : public Error {
 public:
  using Error::Error;
};

class DegenerateBandError : public Error {
 public:
  using Error::Error;
};

class PlacementError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

// Syntax error in a structured record. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class VocabularyError : public Error {
 public:
  explicit VocabularyError(std::string token)
      : Error("unknown vocabulary token: " + token), token_(std::move(token)) {}

  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

class ConstraintError : public Error {
 public:
  using Error::Error;
};

}  // namespace glyphflow
