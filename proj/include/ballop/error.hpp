#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ballop {

enum class ErrorKind {
  InvalidArgument,
  ShapeMismatch,
  SingularDenominator,
  SingularPoint,
  OutOfRange,
  OutOfDomain,
  NotASelfMap,
  NotInvertible,
  WrongVariant,
};

std::string_view to_string(ErrorKind kind);

/// Every precondition failure in the library surfaces as an Error carrying
/// its kind, so callers (CLI, bindings) can map kinds to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace ballop
