#include "tetherplan/common.hpp"

namespace tetherplan {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LengthTooShort: return "LengthTooShort";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::DegenerateSpan: return "DegenerateSpan";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DegenerateThrust: return "DegenerateThrust";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace tetherplan
