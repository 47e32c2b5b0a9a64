#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pgamech {

/// Malformed PGA or thread-equation text. Line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + message),
        message_(message),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// An operation was applied outside its domain (wrong instruction shape,
/// jump into a spliced region, delays passed to codegen, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A rewrite produced a sequence whose behaviour is not an improvement of
/// its input. Always indicates a bug in a rewrite rule.
class VerificationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pgamech
