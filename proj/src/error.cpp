#include "smecs/error.hpp"

namespace smecs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::MalformedJson: return "MalformedJson";
  case ErrorCode::MissingName: return "MissingName";
  case ErrorCode::UnsupportedUrl: return "UnsupportedUrl";
  case ErrorCode::UnsupportedHost: return "UnsupportedHost";
  case ErrorCode::AuthError: return "AuthError";
  case ErrorCode::NotFound: return "NotFound";
  case ErrorCode::RateLimited: return "RateLimited";
  case ErrorCode::TransportError: return "TransportError";
  case ErrorCode::DecodeError: return "DecodeError";
  case ErrorCode::MalformedCff: return "MalformedCff";
  case ErrorCode::MalformedVocabulary: return "MalformedVocabulary";
  case ErrorCode::MalformedCrosswalk: return "MalformedCrosswalk";
  case ErrorCode::UnknownSession: return "UnknownSession";
  case ErrorCode::UnknownField: return "UnknownField";
  case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

} // namespace smecs
