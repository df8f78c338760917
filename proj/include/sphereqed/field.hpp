#pragma once

#include <array>
#include <optional>
#include <complex>
#include <vector>

#include "sphereqed/atom.hpp"
#include "sphereqed/material.hpp"
#include "sphereqed/mie.hpp"

namespace sphereqed {

struct AngularPoint {
  double theta = 0.0;
  double phi = 0.0;
};

struct EmissionPattern {
  std::vector<AngularPoint> grid;
  std::vector<double> values; // |F|^2 / (k_A^3 mu / 4 pi eps0)^2
  Orientation orientation = Orientation::Radial;
  double omega_a = 0.0;
  double r = 0.0;
  double r_a = 0.0;
  int l_max_used = 0;
};

// (e_r, e_theta, e_phi) components of F / (k_A^3 mu / 4 pi eps0). The atom
// sits on the z axis; the tangential dipole points along x.
using FieldVector = std::array<cplx, 3>;

struct FieldOptions {
  bool include_sphere = true; // false drops every Mie coefficient
  int l_max = 0;              // 0 selects the adaptive rule
};

// Field of the atomic dipole at (r, theta, phi), r > r_a, evaluated at the
// frequency `omega` (the emission pattern uses omega = omega_a).
FieldVector emission_field(const MaterialModel &model, double radius, const AtomConfig &atom,
                           double omega, double r, double theta, double phi,
                           const FieldOptions &opts = {});

EmissionPattern far_field_pattern(const MaterialModel &model, double radius, const AtomConfig &atom,
                                  double r, const std::vector<AngularPoint> &grid,
                                  const FieldOptions &opts = {});

// Default grids: 721 theta samples on [0, pi]; phi = 0 only for the radial
// dipole, phi in {0, pi/2} for the tangential one.
std::vector<AngularPoint> default_pattern_grid(Orientation o, int theta_samples = 721);

// Strict interior local maxima whose prominence (height above the higher of
// the two bracketing minima) is at least rel_prominence times the global
// maximum. Returns indices in increasing order.
std::vector<std::size_t> find_lobes(const std::vector<double> &values, double rel_prominence = 1e-3);

struct EnergyFraction {
  double value = 0.0;
  double omega_a = 0.0;
  double delta_r = 0.0;
  int series_terms = 0;
};

// Radial dipole only.
EnergyFraction radiated_fraction(const MaterialModel &model, double radius, const AtomConfig &atom);

// |F|^2 e^{-At}, A = rate_ratio * a0_over_omega. The t = 0 value is the
// pattern value at the same point.
double intensity_markov(const MaterialModel &model, double radius, const AtomConfig &atom, double r,
                        double theta, double phi, double t);

enum class TraceMethod { Exact, Markov };

struct TimeTrace {
  std::vector<double> times;
  std::vector<double> intensity;
  TraceMethod method = TraceMethod::Exact;
  std::size_t frequency_samples = 0; // exact method: Green-tensor evaluations used
};

struct ExactOptions {
  double delta = 0.0; // resonance half-width around omega_a; 0 estimates it
  int threads = 1;    // workers for the frequency-grid build
  double panel_tolerance = 1e-8;
  std::size_t max_evaluations = 2'000'000;
};

// Time-resolved intensity with the full frequency integral over a window
// W = max(50 delta, 200 A0) around omega_a. The t' integral is done in closed
// form for the exponential amplitude, so the frequency panels are refined
// once and reused for every t; the oscillating phase is integrated exactly
// against a quadratic interpolant on each panel. Frequencies outside the
// window enter through pi Re G(omega_a) - P int_W Im G / Delta, which is
// accurate for t >> 1/W.
TimeTrace intensity_exact(const MaterialModel &model, double radius, const AtomConfig &atom, double r,
                          double theta, double phi, const std::vector<double> &times,
                          const ExactOptions &opts = {});

// Half width at half maximum of A(omega) around omega_a, by bracketing.
double estimate_linewidth(const MaterialModel &model, double radius, const AtomConfig &atom);

} // namespace sphereqed
