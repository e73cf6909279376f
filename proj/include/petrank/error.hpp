#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace petrank {

// Broad failure class; the CLI maps each to a process exit code.
enum class ErrorCategory {
  data,      // malformed or inconsistent input data (exit 3)
  config,    // bad configuration or arguments (exit 2)
  upstream,  // a prerequisite pipeline artifact is missing (exit 4)
};

// Single exception type for the library. `code()` is a stable identifier
// such as "BadLabel" or "SchemaMismatch" that tests and callers match on.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message,
        ErrorCategory category = ErrorCategory::data)
      : std::runtime_error(code + ": " + message),
        code_(std::move(code)),
        category_(category) {}

  const std::string& code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_; }

 private:
  std::string code_;
  ErrorCategory category_;
};

inline Error config_error(const std::string& message) {
  return Error("ConfigError", message, ErrorCategory::config);
}

inline Error upstream_missing(const std::string& command) {
  return Error("UpstreamMissing", command, ErrorCategory::upstream);
}

inline int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::config:
      return 2;
    case ErrorCategory::upstream:
      return 4;
    case ErrorCategory::data:
    default:
      return 3;
  }
}

}  // namespace petrank
