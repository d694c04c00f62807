#include "ballop/error.hpp"

namespace ballop {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::SingularDenominator: return "singular-denominator";
    case ErrorKind::SingularPoint: return "singular-point";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::NotASelfMap: return "not-a-self-map";
    case ErrorKind::NotInvertible: return "not-invertible";
    case ErrorKind::WrongVariant: return "wrong-variant";
  }
  return "unknown";
}

}  // namespace ballop
