#pragma once

#include <stdexcept>
#include <string>

namespace wpsenv {

/// Machine-readable error classes. The string form is what REST error
/// bodies carry in their `error` field.
enum class ErrorCode {
  Protocol,
  Validation,
  Network,
  NotFound,
  Gone,
  QuotaExceeded,
  IllegalState,
  Precondition,
  Script,
  BudgetExceeded,
  RemoteFault,
  Timeout,
  Conflict,
  Cancelled,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error(ErrorCode::Protocol, what) {}
};

/// Carries the widget kind (may be empty when no widget is involved) and the
/// human-readable reason separately so the gateway can report both.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& reason, std::string widget = {})
      : Error(ErrorCode::Validation, widget.empty() ? reason : widget + ": " + reason),
        widget_(std::move(widget)),
        reason_(reason) {}
  const std::string& widget() const noexcept { return widget_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string widget_;
  std::string reason_;
};

class NetworkError : public Error {
 public:
  explicit NetworkError(const std::string& what) : Error(ErrorCode::Network, what) {}
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& what) : Error(ErrorCode::NotFound, what) {}
};

class Gone : public Error {
 public:
  explicit Gone(const std::string& what) : Error(ErrorCode::Gone, what) {}
};

class QuotaExceeded : public Error {
 public:
  explicit QuotaExceeded(const std::string& what) : Error(ErrorCode::QuotaExceeded, what) {}
};

class IllegalState : public Error {
 public:
  explicit IllegalState(const std::string& what) : Error(ErrorCode::IllegalState, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorCode::Precondition, what) {}
};

class RemoteFault : public Error {
 public:
  explicit RemoteFault(const std::string& what) : Error(ErrorCode::RemoteFault, what) {}
};

class TimeoutError : public Error {
 public:
  explicit TimeoutError(const std::string& what) : Error(ErrorCode::Timeout, what) {}
};

class ConflictError : public Error {
 public:
  explicit ConflictError(const std::string& what) : Error(ErrorCode::Conflict, what) {}
};

class CancelledError : public Error {
 public:
  explicit CancelledError(const std::string& what = "cancelled") : Error(ErrorCode::Cancelled, what) {}
};

}  // namespace wpsenv
