#pragma once

#include <complex>
#include <string_view>
#include <utility>
#include <vector>

#include "sphereqed/material.hpp"
#include "sphereqed/specfun.hpp"

namespace sphereqed {

enum class Polarization { TE, TM };

std::string_view to_string(Polarization pol);

// Exterior (B) and interior (C) scattering coefficients for one l. The
// exterior field is j + B h, so these are the negatives of the usual
// Bohren-Huffman a_l (TM, "N") and b_l (TE, "M"). Radius R is in lambda_ref.
struct MieCoefficientSet {
  int l = 0;
  cplx bm, bn;
  cplx cm, cn;             // saturating conversions of the scaled values
  ScaledComplex cm_scaled; // interior amplitudes can leave the double range
  ScaledComplex cn_scaled;
  cplx at_frequency;
  std::pair<cplx, cplx> size_params; // z1 = k1 R, z2 = k2 R
};

struct CharacteristicValue {
  cplx value;
  Polarization polarization = Polarization::TM;
  int l = 0;
};

struct FieldPoint {
  double r = 0.0; // lambda_ref
  double theta = 0.0;
  double phi = 0.0;
};

// Refractive index used by every series. Real frequencies take the n_R,
// n_I >= 0 branch; complex ones the principal square root (M and the exterior
// coefficients are even in n, so only the interior ones care).
cplx index_at(const MaterialModel &model, cplx omega);

// Shared truncation rule: ceil(x + 4 x^{1/3} + 2) + pad.
int truncation_order(double x, int pad = 10);

// Tables at z1 and z2 for l = 1..lmax, reusable across coefficient queries.
class MieContext {
public:
  MieContext(const MaterialModel &model, double radius, cplx omega, int lmax);

  int lmax() const { return lmax_; }
  cplx eps() const { return eps_; }
  cplx index() const { return n_; }
  cplx z1() const { return z1_; }
  cplx z2() const { return z2_; }

  MieCoefficientSet coefficients(int l) const;
  cplx bn(int l) const;
  cplx bm(int l) const;
  // Exterior coefficients without conversion; needed once l >> |z1|, where
  // they underflow while B h^2 stays finite.
  ScaledComplex bn_scaled(int l) const;
  ScaledComplex bm_scaled(int l) const;
  ScaledComplex cn(int l) const;
  ScaledComplex cm(int l) const;

  // Mie denominators, normalized to be scale-free: they vanish exactly at the
  // roots of the characteristic equations.
  cplx tm_denominator(int l) const;
  cplx te_denominator(int l) const;

  const SphericalBesselTable &outer() const { return t1_; }
  const SphericalBesselTable &inner() const { return t2_; }

private:
  cplx omega_;
  cplx eps_;
  cplx n_;
  cplx z1_, z2_;
  int lmax_;
  SphericalBesselTable t1_, t2_;
};

MieCoefficientSet mie_coefficients(const MaterialModel &model, double radius, cplx omega, int l);

// M_TE = H'/H(z1) - n J'/J(z2);  M_TM = H'/H(z1) - J'/J(z2)/n + (1 - 1/eps)/(2 z1)
// with half-integer cylinder functions of order l + 1/2. In Riccati form the
// 1/(2z) conversion terms cancel and M = L_xi(z1) - P L_psi(z2), P = n or 1/n.
CharacteristicValue characteristic(const MaterialModel &model, double radius, cplx omega, int l,
                                   Polarization pol);

// Scattering part of Im G_rr(r, r, omega) in units with c = 1 and unit-less
// lengths (k = omega). The frequency prefactor of the fluctuation spectrum is
// dropped, so values are in arbitrary units. Only TM coefficients enter.
double fluctuation_prr(const MaterialModel &model, double radius, double omega, double r);

inline constexpr double surface_guard = 1e-4; // lambda_ref

} // namespace sphereqed
