#pragma once

#include <stdexcept>
#include <string>

namespace covfield {

// Error categories drive the CLI exit code and the "error:<category>:" prefix.
enum class ErrorCategory { Usage, Spec, Math };

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Usage: return "usage";
    case ErrorCategory::Spec: return "spec";
    case ErrorCategory::Math: return "math";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), cat_(cat) {}
  ErrorCategory category() const { return cat_; }

 private:
  ErrorCategory cat_;
};

inline Error usage_error(const std::string& msg) { return Error(ErrorCategory::Usage, msg); }
inline Error spec_error(const std::string& msg) { return Error(ErrorCategory::Spec, msg); }
inline Error math_error(const std::string& msg) { return Error(ErrorCategory::Math, msg); }

}  // namespace covfield
