#include "sphereqed/error.hpp"

namespace sphereqed {

const char *to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidArgument:
    return "invalid argument";
  case ErrorCode::Domain:
    return "domain error";
  case ErrorCode::Range:
    return "range error";
  case ErrorCode::NoConvergence:
    return "no convergence";
  case ErrorCode::BasinEscape:
    return "basin escape";
  case ErrorCode::WrongHalfPlane:
    return "wrong half-plane";
  case ErrorCode::NoResonance:
    return "no resonance";
  case ErrorCode::Quadrature:
    return "quadrature failure";
  }
  return "unknown error";
}

} // namespace sphereqed
