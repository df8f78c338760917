#pragma once

#include <complex>
#include <string_view>
#include <utility>

#include "sphereqed/material.hpp"
#include "sphereqed/mie.hpp"

namespace sphereqed {

enum class Orientation { Radial, Tangential };

std::string_view to_string(Orientation o);

struct AtomConfig {
  double r_a = 0.0;     // lambda_ref
  double delta_r = 0.0; // r_a - R
  double omega_a = 0.0; // omega_ref
  Orientation orientation = Orientation::Radial;
  double a0_over_omega = 0.0; // free-space rate, only used for time evolution

  static AtomConfig near(double radius, double delta_r, double omega_a,
                         Orientation o = Orientation::Radial, double a0_over_omega = 0.0) {
    return {radius + delta_r, delta_r, omega_a, o, a0_over_omega};
  }
};

// Minimum atom-surface distance; macroscopic electrodynamics is meaningless
// closer than interatomic spacings.
inline constexpr double min_delta_r = 1e-4;

void validate(const AtomConfig &atom, double radius);

struct DecayResult {
  double rate_ratio = 0.0;  // A / A0
  double shift_ratio = 0.0; // delta omega_A / A0
  int l_max_used = 0;
  double tail_estimate = 0.0; // bound on the omitted part, in A0 units
  bool converged = false;
};

// Test hooks: drop one polarization or pin the truncation order.
struct SeriesOptions {
  bool include_te = true;
  bool include_tm = true;
  int l_max = 0; // 0 selects the adaptive rule
};

// Decay rate and sphere-induced shift from one pass over the Mie series.
// A_perp/A0 = 1 + 3/2 Re S,  delta_perp/A0 = -3/4 Im S,
//   S = sum l(l+1)(2l+1) B^N (h(x)/x)^2;
// A_par/A0 = 1 + 3/4 Re S',  delta_par/A0 = -3/8 Im S',
//   S' = sum (2l+1) [B^M h(x)^2 + B^N ([x h(x)]'/x)^2],  x = k_A r_A.
DecayResult decay_rate(const MaterialModel &model, double radius, const AtomConfig &atom,
                       const SeriesOptions &opts = {});

// Same series; kept separate so callers that only need the shift read well.
DecayResult lamb_shift(const MaterialModel &model, double radius, const AtomConfig &atom,
                       const SeriesOptions &opts = {});

// Leading near-surface terms; R is needed for the tangential 1/Delta r term.
std::pair<double, double> decay_rate_near_surface(const MaterialModel &model, double radius,
                                                  const AtomConfig &atom);

// Leading near-surface shifts (perp, par) with the sign that follows from the
// series, (+3/16)(|eps|^2 - 1)/|eps + 1|^2 / (k dr)^3 for the radial dipole.
std::pair<double, double> lamb_shift_near_surface(const MaterialModel &model, double radius,
                                                  const AtomConfig &atom);

// -(A delta / 2) Delta / (Delta^2 + delta^2), Delta = omega_A - Omega.
double lorentzian_shift_model(double a_at_peak, double delta, double detuning);

// exp[(-A/2 + i shift) t].
cplx markov_amplitude(double rate, double shift, double t);

} // namespace sphereqed
