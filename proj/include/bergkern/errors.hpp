#pragma once

#include <stdexcept>
#include <string>

namespace bergkern {

// Error categories. The CLI maps Domain/Validation/Io to exit 2 and
// Window/Numeric to exit 3.
enum class ErrorKind { Domain, Validation, Window, Numeric, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  const char* kind_name() const noexcept;

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) raise(kind, what);
}

}  // namespace bergkern
