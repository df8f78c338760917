#pragma once

#include <stdexcept>
#include <string>

namespace sphereqed {

enum class ErrorCode {
  InvalidArgument,
  Domain,
  Range,
  NoConvergence,
  BasinEscape,
  WrongHalfPlane,
  NoResonance,
  Quadrature,
};

const char *to_string(ErrorCode code);

// All numerical failures surface as this exception; the C API maps the code
// onto its status enum and keeps the message for sqed_last_error().
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace sphereqed
