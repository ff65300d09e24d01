#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace magnomech {

enum class ErrorKind {
  InvalidParams,
  DegenerateDenominator,
  EigenFailure,
  SingularSystem,
  ResidualTooLarge,
  IndexOutOfRange,
  NonPhysical,
  MonogamyViolation,
  BadAxis,
  IoError,
  ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NonPhysical: return "NonPhysical";
    case ErrorKind::MonogamyViolation: return "MonogamyViolation";
    case ErrorKind::BadAxis: return "BadAxis";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Single exception type for the library; the kind says what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace magnomech
