#include "wpsenv/error.hpp"

namespace wpsenv {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Protocol: return "protocol_error";
    case ErrorCode::Validation: return "validation_error";
    case ErrorCode::Network: return "network_error";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Gone: return "gone";
    case ErrorCode::QuotaExceeded: return "quota_exceeded";
    case ErrorCode::IllegalState: return "illegal_state";
    case ErrorCode::Precondition: return "precondition_error";
    case ErrorCode::Script: return "script_error";
    case ErrorCode::BudgetExceeded: return "budget_exceeded";
    case ErrorCode::RemoteFault: return "remote_fault";
    case ErrorCode::Timeout: return "timeout";
    case ErrorCode::Conflict: return "conflict";
    case ErrorCode::Cancelled: return "cancelled";
  }
  return "error";
}

}  // namespace wpsenv
