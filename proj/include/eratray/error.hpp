#pragma once

#include <stdexcept>
#include <string>

namespace eratray {

enum class ErrorCode {
  InvalidBound,
  ResourceLimit,
  OutOfRange,
  NotPrime,
  NotPrincipalBase,
  NotTwin,
  InvalidPattern,
  InvalidDomain,
  InvalidFormat,
  DomainError,
  NoConvergence,
  IllConditioned,
  ChecksumMismatch,
  VersionMismatch,
  IoFailure,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace eratray
