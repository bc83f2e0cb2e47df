#pragma once

#include <stdexcept>
#include <string>

namespace tdaeeg {

enum class ErrorCode {
  invalid_argument = 1,
  io = 2,
  parse = 3,
  domain = 4,
  stage = 5,
};

// Base exception for everything the library throws on bad input or I/O.
// The code travels across the C boundary unchanged.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::invalid_argument, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::parse, what) {}
};

// A computation is undefined for the given input (zero denominators,
// degenerate series, singular bandwidth).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};

// Pipeline failure tagged with the stage that raised it and, when known,
// the file it was working on.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string file, const std::string& message);
  const std::string& stage() const noexcept { return stage_; }
  const std::string& file() const noexcept { return file_; }

 private:
  std::string stage_;
  std::string file_;
};

}  // namespace tdaeeg
