#pragma once

#include <complex>
#include <vector>

namespace sphereqed {

using cplx = std::complex<double>;

// Complex number carried as mant * exp(scale). Spherical functions of high
// order or deep-evanescent argument leave the double range long before the
// products that enter the Mie coefficients do.
struct ScaledComplex {
  cplx mant{0.0, 0.0};
  double scale = 0.0;

  ScaledComplex() = default;
  ScaledComplex(cplx m, double s = 0.0) : mant(m), scale(s) {}

  // Renormalize so that |mant| is 1 (or mant is zero).
  ScaledComplex normalized() const;
  double log_abs() const;
  bool is_zero() const { return mant == cplx(0.0, 0.0); }
  // Throws Error(Range) when the value does not fit in a double.
  cplx value() const;
  // Like value() but flushes underflow to zero and overflow to inf.
  cplx value_or_saturate() const;
};

ScaledComplex operator*(const ScaledComplex &a, const ScaledComplex &b);
ScaledComplex operator/(const ScaledComplex &a, const ScaledComplex &b);
ScaledComplex operator+(const ScaledComplex &a, const ScaledComplex &b);
ScaledComplex operator-(const ScaledComplex &a, const ScaledComplex &b);
ScaledComplex operator-(const ScaledComplex &a);
ScaledComplex operator*(const ScaledComplex &a, cplx b);
ScaledComplex operator*(cplx b, const ScaledComplex &a);

struct SphericalFunctionValue {
  cplx j;
  cplx y;
  cplx h1;
  cplx riccati_j_prime;  // d[z j_l(z)]/dz
  cplx riccati_h1_prime; // d[z h1_l(z)]/dz
};

// j_l, h1_l and their Riccati derivatives for l = 0..lmax at one argument.
//
// h1_l runs upward from its closed forms, which is stable for every z.
// j_l comes from the downward continued fraction for rho_l = j_{l+1}/j_l
// (Miller region start) combined with the cross product
//   j_{l+1} h_l - j_l h_{l+1} = i / z^2,
// giving j_l = i / (z^2 (rho_l h_l - h_{l+1})) without a separate
// normalization pass. This holds up for large |Im z|, where plain upward
// recurrence of j_l loses all accuracy.
class SphericalBesselTable {
public:
  SphericalBesselTable(cplx z, int lmax);

  cplx z() const { return z_; }
  int lmax() const { return lmax_; }

  ScaledComplex j(int l) const { return {jm_[l], js_[l]}; }
  ScaledComplex jr(int l) const { return {jrm_[l], js_[l]}; }
  ScaledComplex h(int l) const { return {hm_[l], hs_[l]}; }
  ScaledComplex hr(int l) const { return {hrm_[l], hs_[l]}; }
  ScaledComplex y(int l) const;
  ScaledComplex yr(int l) const;

  // [z f]' / [z f], the Riccati log-derivatives; scale-free.
  cplx log_deriv_j(int l) const { return jrm_[l] / (z_ * jm_[l]); }
  cplx log_deriv_h(int l) const { return hrm_[l] / (z_ * hm_[l]); }

  SphericalFunctionValue at(int l) const;

private:
  cplx z_;
  int lmax_;
  std::vector<cplx> jm_, jrm_, hm_, hrm_;
  std::vector<double> js_, hs_;
};

// Single-order convenience wrapper. Rejects z == 0 (Domain) and reports
// overflow as Error(Range) naming l and z. Accuracy is about 1e-13 relative
// for |z| <= 1e3 and l <= 200; beyond that it degrades slowly with the
// conditioning of rho_l h_l - h_{l+1}.
SphericalFunctionValue sph_bessel(int l, cplx z);

// Minimum starting order for the downward ratio recurrence.
int miller_start(int lmax, cplx z);

struct AngularFunctions {
  double p = 0.0;         // P_l^m(cos theta), no Condon-Shortley phase
  double dp_dtheta = 0.0; // dP_l^m/dtheta
  double pi_term = 0.0;   // m P_l^m / sin(theta), finite limit at the poles
  double tilde_p = 0.0;   // l(l+1) P_l - cos(theta) P_l'(cos theta)
};

AngularFunctions legendre(int l, int m, double theta);

// m = 0 and m = 1 columns for l = 0..lmax at one angle, as consumed by the
// field series.
struct LegendreColumns {
  std::vector<double> p0;       // P_l
  std::vector<double> dp0;      // dP_l/dtheta = -P_l^1
  std::vector<double> p1;       // P_l^1
  std::vector<double> p1_sin;   // P_l^1 / sin(theta) = P_l'(cos theta)
  std::vector<double> dp1;      // dP_l^1/dtheta
  std::vector<double> tilde_p;  // l(l+1) P_l - cos(theta) P_l'(cos theta)
};

LegendreColumns legendre_columns(int lmax, double theta);

// Ai(-x) for real x >= 0.
double airy_ai_neg(double x);

// First `count` positive roots of Ai(-z), increasing; count in [1, 20].
std::vector<double> airy_neg_roots(int count);

} // namespace sphereqed
