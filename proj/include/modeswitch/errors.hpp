#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modeswitch {

/// Invalid configuration (bad sizes, empty arm sets, unwritable output).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API misuse: stepping a terminal environment, bad head index, length mismatch.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite value where a finite one is required.
class NumericError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Variant string rejected by the parser. Carries the offending token and
/// its byte offset in the input.
class ParseError : public std::invalid_argument {
 public:
  ParseError(std::string token, std::size_t position, const std::string& why)
      : std::invalid_argument("parse error at position " + std::to_string(position) +
                              " near '" + token + "': " + why),
        token_(std::move(token)),
        position_(position) {}

  const std::string& token() const noexcept { return token_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::string token_;
  std::size_t position_;
};

}  // namespace modeswitch
