#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ghim {

enum class Errc {
  invalid_argument,
  not_found,
  duplicate,
  insufficient_funds,
  overflow,
  invalid_state,
  no_route,
  expired,
  forbidden,
  io,
  rejected,
};

std::string_view to_string(Errc code) noexcept;

/// Domain error raised by every sandbox module. The CLI maps it to exit code 1
/// and the gateway to an error frame carrying `code()`.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Malformed request: missing argument, unknown verb, wrong type.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ghim
