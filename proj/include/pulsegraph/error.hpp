#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pulsegraph {

enum class ErrorCode {
  InvalidInput,
  InvalidFilterSpec,
  EmptyResult,
  MissingPrior,
  ParseError,
  RangeError,
  CorrUndefined,
  ManifestError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can branch on the category instead of the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidFilterSpec: return "InvalidFilterSpec";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::MissingPrior: return "MissingPrior";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::CorrUndefined: return "CorrUndefined";
    case ErrorCode::ManifestError: return "ManifestError";
  }
  return "Unknown";
}

}  // namespace pulsegraph
