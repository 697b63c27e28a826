#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uoterrant {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OverlapError : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class InvalidEdit : public Error {
 public:
  using Error::Error;
};

// Malformed input file. line() is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

class DimMismatch : public Error {
 public:
  using Error::Error;
};

class MissingEmbedding : public Error {
 public:
  explicit MissingEmbedding(std::string text)
      : Error("missing embedding for sentence: \"" + text + "\""), text_(std::move(text)) {}
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

class ServiceError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class MassMismatch : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class CoverageError : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

}  // namespace uoterrant
