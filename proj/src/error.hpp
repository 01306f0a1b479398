#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace modsum {

enum class ErrorCode {
  InvalidArgument,
  SyntaxError,
  UnknownIdentifier,
  DomainError,
  HypothesisViolation,
  CellTooWide,
  NoRoot,
  ScheduleTooCoarse,
  DerivativeDisagreement,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a code so the C layer can map
// it onto a status value. Syntax errors also carry the byte offset.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::optional<std::size_t> offset = std::nullopt)
      : std::runtime_error(what), code_(code), offset_(offset) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> offset_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace modsum
