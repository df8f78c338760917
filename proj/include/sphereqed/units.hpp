#pragma once

#include <numbers>

namespace sphereqed {

// Frequencies are measured in a reference frequency w_ref (w_T for
// dielectrics, w_P for metals) and lengths in lambda_ref = 2 pi c / w_ref.
// Internally c = w_ref = 1, so a length L (in lambda_ref) corresponds to
// the dimensionless wavenumber-length 2 pi L.
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double to_natural_length(double lambda_units) {
  return two_pi * lambda_units;
}

} // namespace sphereqed
