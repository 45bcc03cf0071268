#pragma once

#include <stdexcept>
#include <string>

namespace ragq {

// Broad classes used by the CLI to pick an exit code.
enum class ErrorClass { usage, data, runtime };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorClass::usage, what) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(ErrorClass::data, what), row_(row), column_(column) {}
  // 1-based data row (header excluded) and 1-based column.
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class IoError : public Error {
 public:
  // Unreadable input data is a data error; failed writes are runtime errors.
  explicit IoError(const std::string& what, ErrorClass cls = ErrorClass::runtime) : Error(cls, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorClass::runtime, what) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what) : Error(ErrorClass::runtime, what) {}
};

class SignalTooShortError : public Error {
 public:
  explicit SignalTooShortError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class NoFeasiblePointError : public Error {
 public:
  explicit NoFeasiblePointError(const std::string& what) : Error(ErrorClass::runtime, what) {}
};

class TrainingFailedError : public Error {
 public:
  TrainingFailedError(const std::string& what, int epoch)
      : Error(ErrorClass::runtime, what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

class MapeUndefinedError : public Error {
 public:
  explicit MapeUndefinedError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class R2UndefinedError : public Error {
 public:
  explicit R2UndefinedError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class CorrelationUndefinedError : public Error {
 public:
  explicit CorrelationUndefinedError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class NothingToRenderError : public Error {
 public:
  explicit NothingToRenderError(const std::string& what) : Error(ErrorClass::runtime, what) {}
};

// Wraps a failure from one pipeline stage, keeping the original class.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const Error& cause)
      : Error(cause.error_class(), stage + ": " + cause.what()), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace ragq
