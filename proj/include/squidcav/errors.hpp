#pragma once

#include <stdexcept>
#include <string>

namespace squidcav {

/// Error taxonomy shared by the library and the CLI. Each category maps to a
/// distinct process exit code so scripted callers can react to the failure
/// class without parsing messages.
enum class ErrorCategory {
  config,        ///< malformed/invalid configuration (exit code 2)
  verification,  ///< a protocol self-check failed (exit code 3)
  numeric,       ///< non-convergence, stiffness, positivity loss (exit code 4)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string message)
      : std::runtime_error(std::move(message)), category_(category) {}

  [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

  [[nodiscard]] int exit_code() const noexcept {
    switch (category_) {
      case ErrorCategory::config: return 2;
      case ErrorCategory::verification: return 3;
      case ErrorCategory::numeric: return 4;
    }
    return 1;
  }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::string message)
      : Error(ErrorCategory::config, std::move(message)) {}
};

class VerificationError : public Error {
 public:
  explicit VerificationError(std::string message)
      : Error(ErrorCategory::verification, std::move(message)) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(std::string message)
      : Error(ErrorCategory::numeric, std::move(message)) {}
};

}  // namespace squidcav
