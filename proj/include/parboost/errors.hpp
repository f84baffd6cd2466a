#pragma once

#include <stdexcept>
#include <string>

namespace parboost {

enum class ErrorKind {
  InvalidArgument, // bad parameter or precondition violation
  Parse,           // malformed config or dataset
  Io,              // file system failure
  Construction,    // generator could not satisfy its invariant
  Protocol,        // query-protocol violation
  Assertion,       // hard numerical invariant failed
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::Construction: return "construction";
    case ErrorKind::Protocol: return "protocol";
    case ErrorKind::Assertion: return "assertion";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

} // namespace parboost
