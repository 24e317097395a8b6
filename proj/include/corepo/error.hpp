#pragma once

#include <stdexcept>
#include <string>

namespace corepo {

enum class ErrorKind {
  InvalidLogprob,
  EmptySample,
  EmptyReasoning,
  InconsistentScores,
  GatewayAuth,
  GatewayTimeout,
  GatewayTransport,
  GatewayMalformed,
  InputMalformed,
  Usage,
  Internal,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidLogprob: return "invalid_logprob";
    case ErrorKind::EmptySample: return "empty_sample";
    case ErrorKind::EmptyReasoning: return "empty_reasoning";
    case ErrorKind::InconsistentScores: return "inconsistent_scores";
    case ErrorKind::GatewayAuth: return "gateway_auth";
    case ErrorKind::GatewayTimeout: return "gateway_timeout";
    case ErrorKind::GatewayTransport: return "gateway_transport";
    case ErrorKind::GatewayMalformed: return "gateway_malformed";
    case ErrorKind::InputMalformed: return "input_malformed";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace corepo
