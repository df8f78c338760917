#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "sphereqed/material.hpp"
#include "sphereqed/mie.hpp"

namespace sphereqed {

enum class ResonanceKind { WG, SG };

std::string_view to_string(ResonanceKind kind);

struct Resonance {
  cplx omega_c; // Omega - i delta
  Polarization pol = Polarization::TM;
  int l = 0;
  std::optional<int> radial_order; // empty for SG
  ResonanceKind kind = ResonanceKind::WG;
  double delta_rad = 0.0;
  double delta_abs = 0.0;
  double q_tot = 0.0;
  double q_rad = 0.0;
  double q_abs = 0.0;
  double residual = 0.0; // |M(omega_c)|

  double omega() const { return omega_c.real(); }
  double delta() const { return -omega_c.imag(); }
};

// Implicit asymptotic relation for radial order i, solved by accelerated
// fixed-point iteration in the complex plane.
cplx wg_seed(const MaterialModel &model, double radius, int l, int i, Polarization pol);

// Surface-guided TM seed. Throws Error(NoResonance) when the self-consistent
// solution violates eps_R < -1 (equivalently Re omega above the SG bound).
cplx sg_seed(const MaterialModel &model, double radius, int l);

struct RootOptions {
  int max_iterations = 60;
  double basin = 0.05;
  // Roots with Im omega up to this value (relative to |omega|) are accepted
  // and clamped onto the real axis; used for the lossless reference.
  double real_axis_tolerance = 0.0;
};

// Newton iteration on M(omega). Only omega_c, pol, l and residual are filled.
Resonance refine_root(const MaterialModel &model, double radius, int l, Polarization pol,
                      cplx seed, const RootOptions &opts = {});

// Re-solves with gamma = 0, starting from the lossy root.
std::pair<double, double> split_linewidth(const MaterialModel &model, double radius, int l,
                                          Polarization pol, const Resonance &res);

enum class TaylorDerivative {
  Nondispersive, // M' = eps - 1 (TE) or (eps - 1)[(1 + 1/eps)(nu/x)^2 - 1] (TM)
  Numerical,     // central difference of M, includes d eps/d omega
};

// First-order Taylor estimate of delta_tot at a real Omega.
double linewidth_taylor(const MaterialModel &model, double radius, int l, Polarization pol,
                        double omega,
                        TaylorDerivative derivative = TaylorDerivative::Nondispersive);

double q_abs_closed_form(const RefractiveIndex &n, double nu, Polarization pol, ResonanceKind kind);

// Seed, refine, split and fill the quality factors.
Resonance find_wg(const MaterialModel &model, double radius, int l, int i, Polarization pol);
Resonance find_sg(const MaterialModel &model, double radius, int l);

// Radial orders 1..count for one l, with deflation against already
// accepted roots (a candidate within 10 delta of a known root is rejected).
std::vector<Resonance> find_wg_series(const MaterialModel &model, double radius, int l,
                                      int count, Polarization pol);

struct Rectangle {
  double re_min, re_max, im_min, im_max;
};

// Zeros of the (entire) Mie denominator inside the rectangle, by the
// argument principle. Throws Error(Quadrature) if the contour passes too
// close to a zero to resolve the phase.
int count_roots(const MaterialModel &model, double radius, int l, Polarization pol,
                const Rectangle &rect);

} // namespace sphereqed
