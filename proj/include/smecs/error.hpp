#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace smecs {

enum class ErrorCode {
  MalformedJson,
  MissingName,
  UnsupportedUrl,
  UnsupportedHost,
  AuthError,
  NotFound,
  RateLimited,
  TransportError,
  DecodeError,
  MalformedCff,
  MalformedVocabulary,
  MalformedCrosswalk,
  UnknownSession,
  UnknownField,
  InvariantViolation,
};

std::string_view to_string(ErrorCode code);

// Every failure the library reports is an Error carrying a machine-readable
// code. Messages never contain credentials.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Seconds to wait before retrying; only set for RateLimited.
  std::optional<long> retry_after() const noexcept { return retry_after_; }
  Error &with_retry_after(std::optional<long> seconds) {
    retry_after_ = seconds;
    return *this;
  }

private:
  ErrorCode code_;
  std::optional<long> retry_after_;
};

} // namespace smecs
