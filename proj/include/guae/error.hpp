#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace guae {

enum class ErrorCode {
  InvalidConfig,
  InvalidRange,
  NoCoordinates,
  EmptyInput,
  FileNotFound,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::NoCoordinates: return "NoCoordinates";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::FileNotFound: return "FileNotFound";
  }
  return "Unknown";
}

/// Precondition failure raised by library operations. Parse failures of
/// model output are not exceptional and travel as values instead (see
/// ParseResult in action.hpp).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace guae
