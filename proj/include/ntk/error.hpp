#pragma once

#include <stdexcept>
#include <string>

namespace ntk {

enum class ErrorCode {
  domain = 1,
  invalid_argument = 2,
  numerical = 3,
  io = 4,
  parse = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Input outside the mathematical domain of a kernel (|u| > 1, zero-norm vector, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::invalid_argument, what) {}
};

/// Singular systems, ill-conditioned fits, failed eigensolves.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCode::numerical, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::parse, what) {}
};

}  // namespace ntk
