#include "bergkern/errors.hpp"

namespace bergkern {

const char* Error::kind_name() const noexcept {
  switch (kind_) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Window: return "window";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace bergkern
