#pragma once

#include <stdexcept>
#include <string>

namespace bugloc {

// Values double as process exit codes for the CLI.
enum class ErrorKind : int {
  kUsage = 2,
  kData = 3,
  kProvider = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& msg) { return {ErrorKind::kUsage, msg}; }
inline Error data_error(const std::string& msg) { return {ErrorKind::kData, msg}; }
inline Error provider_error(const std::string& msg) { return {ErrorKind::kProvider, msg}; }

}  // namespace bugloc
