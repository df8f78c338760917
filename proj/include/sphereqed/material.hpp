#pragma once

#include <complex>
#include <string_view>

namespace sphereqed {

// Single-resonance Drude-Lorentz medium. omega_t = 0 gives the metallic
// parameterization; gamma = 0 is only used for the lossless reference
// medium when splitting linewidths.
struct MaterialModel {
  double omega_p = 0.0;
  double omega_t = 1.0;
  double gamma = 1e-4;

  static MaterialModel dielectric(double omega_p, double gamma) {
    return {omega_p, 1.0, gamma};
  }
  static MaterialModel metal(double gamma_over_omega_p) {
    return {1.0, 0.0, gamma_over_omega_p};
  }

  bool is_metallic() const { return omega_t == 0.0; }
  bool is_lossless() const { return gamma == 0.0; }
  MaterialModel lossless() const { return {omega_p, omega_t, 0.0}; }
};

// Throws Error(InvalidArgument) unless omega_p, omega_t >= 0 and gamma > 0
// (gamma == 0 accepted when allow_lossless is set).
void validate(const MaterialModel &model, bool allow_lossless = false);

struct Permittivity {
  std::complex<double> value;
  double at_frequency = 0.0;
};

struct RefractiveIndex {
  std::complex<double> value;

  double real() const { return value.real(); }
  double imag() const { return value.imag(); }
};

struct BandGap {
  double lower = 0.0;    // w_T
  double upper = 0.0;    // w_L = sqrt(w_T^2 + w_P^2)
  double sg_bound = 0.0; // sqrt(w_T^2 + w_P^2 / 2), where eps_R = -1 for gamma -> 0
};

enum class Regime { BelowGap, InGap, AboveGap };

std::string_view to_string(Regime regime);

// eps(w) = 1 + w_P^2 / (w_T^2 - w^2 - i w gamma), real w > 0.
Permittivity permittivity(const MaterialModel &model, double omega);

// Same rational function continued to complex frequency (root finding).
std::complex<double> permittivity_at(const MaterialModel &model,
                                     std::complex<double> omega);

// n_R, n_I >= 0 from the two half-angle radicals. The smaller of the two is
// recovered from n_R n_I = eps_I / 2, which avoids cancellation when
// |eps_I| << |eps_R|.
RefractiveIndex refractive_index(const Permittivity &eps);
RefractiveIndex refractive_index(std::complex<double> eps);

BandGap band_gap(const MaterialModel &model);

// Boundaries go to the lower regime: w <= w_T is below-gap, w_T < w <= w_L is
// in-gap. The metallic case has no below-gap branch.
Regime classify_regime(const MaterialModel &model, double omega);

} // namespace sphereqed
