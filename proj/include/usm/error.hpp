#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace usm {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  SingularMatrix,
  Unsupported,
  OutOfRange,
  BoundInapplicable,
  DenseCutoff,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; the code drives the C API status
// and the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t index, const std::string& what)
      : Error(ErrorCode::SingularMatrix, what), index_(index) {}

  // Zero-based row/column of the offending pivot.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace usm
