#include "sphereqed/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sphereqed/error.hpp"

namespace sphereqed {

namespace {

constexpr double log_max = 709.0;
constexpr double log_min = -745.0;
constexpr double rescale_above = 1e100;

std::string describe(int l, cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << "l = " << l << ", z = (" << z.real() << ", " << z.imag() << ")";
  return os.str();
}

} // namespace

ScaledComplex ScaledComplex::normalized() const {
  const double a = std::abs(mant);
  if (a == 0.0 || !std::isfinite(a))
    return {mant, a == 0.0 ? 0.0 : scale};
  return {mant / a, scale + std::log(a)};
}

double ScaledComplex::log_abs() const {
  const double a = std::abs(mant);
  if (a == 0.0)
    return -std::numeric_limits<double>::infinity();
  return scale + std::log(a);
}

cplx ScaledComplex::value() const {
  if (is_zero())
    return 0.0;
  const double la = log_abs();
  if (!(la < log_max))
    throw Error(ErrorCode::Range, "scaled value overflows double");
  return value_or_saturate();
}

cplx ScaledComplex::value_or_saturate() const {
  if (is_zero())
    return 0.0;
  const double a = std::abs(mant);
  const double la = scale + std::log(a);
  if (la < log_min)
    return 0.0;
  if (la >= log_max)
    return mant / a * std::numeric_limits<double>::infinity();
  return mant / a * std::exp(la);
}

ScaledComplex operator*(const ScaledComplex &a, const ScaledComplex &b) {
  return ScaledComplex{a.mant * b.mant, a.scale + b.scale}.normalized();
}

ScaledComplex operator/(const ScaledComplex &a, const ScaledComplex &b) {
  if (b.is_zero())
    throw Error(ErrorCode::Domain, "division by zero in scaled arithmetic");
  return ScaledComplex{a.mant / b.mant, a.scale - b.scale}.normalized();
}

ScaledComplex operator+(const ScaledComplex &a, const ScaledComplex &b) {
  if (a.is_zero())
    return b;
  if (b.is_zero())
    return a;
  const double s = std::max(a.scale, b.scale);
  const cplx m = a.mant * std::exp(a.scale - s) + b.mant * std::exp(b.scale - s);
  return ScaledComplex{m, s}.normalized();
}

ScaledComplex operator-(const ScaledComplex &a) { return {-a.mant, a.scale}; }

ScaledComplex operator-(const ScaledComplex &a, const ScaledComplex &b) {
  return a + (-b);
}

ScaledComplex operator*(const ScaledComplex &a, cplx b) {
  return ScaledComplex{a.mant * b, a.scale}.normalized();
}

ScaledComplex operator*(cplx b, const ScaledComplex &a) { return a * b; }

int miller_start(int lmax, cplx z) {
  const double az = std::abs(z);
  const int guard = std::max(20, static_cast<int>(std::ceil(10.0 * std::cbrt(az))));
  const int base = std::max(lmax, static_cast<int>(std::ceil(az)));
  return base + guard;
}

SphericalBesselTable::SphericalBesselTable(cplx z, int lmax) : z_(z), lmax_(lmax) {
  if (z == cplx(0.0, 0.0))
    throw Error(ErrorCode::Domain, "spherical Bessel functions require z != 0");
  if (lmax < 0)
    throw Error(ErrorCode::InvalidArgument, "spherical Bessel table needs lmax >= 0");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw Error(ErrorCode::Domain, "non-finite argument: " + describe(lmax, z));

  const int n = lmax + 1;
  jm_.resize(n);
  jrm_.resize(n);
  js_.resize(n);
  hm_.resize(n + 1);
  hs_.resize(n + 1);
  hrm_.resize(n);

  // Below the real axis both the upward h recurrence and the cross product
  // for j lose accuracy. Reflect instead: j_l(z) = (-1)^l j_l(-z) and
  // h1_l(z) = (-1)^l [2 j_l(-z) - h1_l(-z)], likewise for the Riccati
  // derivatives.
  if (z.imag() < 0.0) {
    const SphericalBesselTable mirror(-z, lmax + 1);
    for (int l = 0; l <= n; ++l) {
      const double sign = (l % 2 == 0) ? 1.0 : -1.0;
      const ScaledComplex hv = (cplx(2.0) * mirror.j(l) - mirror.h(l)).normalized();
      hm_[l] = sign * hv.mant;
      hs_[l] = hv.scale;
      if (l == n)
        break;
      jm_[l] = sign * mirror.jm_[l];
      jrm_[l] = sign * mirror.jrm_[l];
      js_[l] = mirror.js_[l];
      const ScaledComplex hr = cplx(2.0) * mirror.jr(l) - mirror.hr(l);
      hrm_[l] = hr.is_zero() ? cplx(0.0) : sign * hr.mant * std::exp(hr.scale - hv.scale);
    }
    return;
  }

  using namespace std::complex_literals;
  // e^{iz} = e^{i Re z} e^{-Im z}; the real exponential goes into the scale.
  const cplx phase = std::polar(1.0, z.real());
  const double s0 = -z.imag();
  hm_[0] = -1i * phase / z;
  hs_[0] = s0;
  if (n >= 1) {
    hm_[1] = -phase * (z + 1i) / (z * z);
    hs_[1] = s0;
  }
  {
    cplx a = hm_[0];
    cplx b = hm_[1];
    double s = s0;
    for (int l = 1; l < n; ++l) {
      cplx c = static_cast<double>(2 * l + 1) / z * b - a;
      const double ac = std::abs(c);
      if (!std::isfinite(ac))
        throw Error(ErrorCode::Range, "h1 recurrence overflow at " + describe(l + 1, z));
      if (ac > rescale_above) {
        b /= ac;
        c /= ac;
        s += std::log(ac);
      }
      hm_[l + 1] = c;
      hs_[l + 1] = s;
      a = b;
      b = c;
    }
  }
  for (int l = 0; l < n; ++l) {
    const cplx next = hm_[l + 1] * std::exp(hs_[l + 1] - hs_[l]);
    hrm_[l] = static_cast<double>(l + 1) * hm_[l] - z * next;
  }

  // rho_l = j_{l+1}/j_l by downward continued fraction.
  const int top = miller_start(lmax, z);
  std::vector<cplx> rho(n);
  cplx r = z / static_cast<double>(2 * top + 3);
  for (int l = top; l >= 1; --l) {
    cplx den = static_cast<double>(2 * l + 1) / z - r;
    if (den == cplx(0.0, 0.0))
      den = 1e-300;
    r = 1.0 / den;
    if (l - 1 < n)
      rho[l - 1] = r;
  }
  const cplx z2 = z * z;
  for (int l = 0; l < n; ++l) {
    const cplx next = hm_[l + 1] * std::exp(hs_[l + 1] - hs_[l]);
    const cplx d = rho[l] * hm_[l] - next;
    cplx jm = 1i / (z2 * d);
    if (!std::isfinite(jm.real()) || !std::isfinite(jm.imag()))
      jm = 0.0;
    jm_[l] = jm;
    js_[l] = -hs_[l];
    jrm_[l] = jm * (static_cast<double>(l + 1) - z * rho[l]);
  }
}

ScaledComplex SphericalBesselTable::y(int l) const {
  using namespace std::complex_literals;
  return (h(l) - j(l)) * cplx(-1i);
}

ScaledComplex SphericalBesselTable::yr(int l) const {
  using namespace std::complex_literals;
  return (hr(l) - jr(l)) * cplx(-1i);
}

SphericalFunctionValue SphericalBesselTable::at(int l) const {
  if (l < 0 || l > lmax_)
    throw Error(ErrorCode::InvalidArgument, "order outside table: " + describe(l, z_));
  try {
    return {j(l).value(), y(l).value(), h(l).value(), jr(l).value(), hr(l).value()};
  } catch (const Error &e) {
    if (e.code() != ErrorCode::Range)
      throw;
    throw Error(ErrorCode::Range,
                "spherical Bessel value out of double range at " + describe(l, z_));
  }
}

SphericalFunctionValue sph_bessel(int l, cplx z) {
  if (l < 0)
    throw Error(ErrorCode::InvalidArgument, "sph_bessel requires l >= 0");
  if (z == cplx(0.0, 0.0))
    throw Error(ErrorCode::Domain, "sph_bessel: z = 0 is not supported");
  return SphericalBesselTable(z, l).at(l);
}

namespace {

double double_factorial_odd(int m) {
  // (2m-1)!!
  double f = 1.0;
  for (int k = 1; k <= m; ++k)
    f *= 2.0 * k - 1.0;
  return f;
}

// P_l^m for one l by upward recurrence from P_m^m = start.
double assoc_upward(int l, int m, double x, double start) {
  if (l < m)
    return 0.0;
  double pm = start;
  if (l == m)
    return pm;
  double pm1 = (2.0 * m + 1.0) * x * pm;
  for (int k = m + 1; k < l; ++k) {
    const double next = ((2.0 * k + 1.0) * x * pm1 - (k + m) * pm) / (k - m + 1.0);
    pm = pm1;
    pm1 = next;
  }
  return pm1;
}

double assoc_p(int l, int m, double x, double s) {
  if (m < 0 || l < m)
    return 0.0;
  return assoc_upward(l, m, x, double_factorial_odd(m) * std::pow(s, m));
}

// P_l^m / sin(theta) for m >= 1, finite at the poles.
double assoc_p_over_sin(int l, int m, double x, double s) {
  if (m < 1 || l < m)
    return 0.0;
  return assoc_upward(l, m, x, double_factorial_odd(m) * std::pow(s, m - 1));
}

} // namespace

AngularFunctions legendre(int l, int m, double theta) {
  if (l < 0 || m < 0 || m > l)
    throw Error(ErrorCode::InvalidArgument, "legendre requires 0 <= m <= l");
  if (!(theta >= 0.0 && theta <= std::numbers::pi))
    throw Error(ErrorCode::InvalidArgument, "legendre requires theta in [0, pi]");
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  AngularFunctions out;
  out.p = assoc_p(l, m, x, s);
  if (m == 0) {
    out.dp_dtheta = -assoc_p(l, 1, x, s);
  } else {
    const double lower = assoc_p(l, m - 1, x, s);
    const double upper = assoc_p(l, m + 1, x, s);
    out.dp_dtheta = 0.5 * ((l + m) * (l - m + 1.0) * lower - upper);
  }
  out.pi_term = m * assoc_p_over_sin(l, m, x, s);
  const double p0 = m == 0 ? out.p : assoc_p(l, 0, x, s);
  out.tilde_p = l * (l + 1.0) * p0 - x * assoc_p_over_sin(l, 1, x, s);
  return out;
}

LegendreColumns legendre_columns(int lmax, double theta) {
  if (lmax < 0)
    throw Error(ErrorCode::InvalidArgument, "legendre_columns requires lmax >= 0");
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  const int n = lmax + 1;
  LegendreColumns c;
  c.p0.assign(n, 0.0);
  c.dp0.assign(n, 0.0);
  c.p1.assign(n, 0.0);
  c.p1_sin.assign(n, 0.0);
  c.dp1.assign(n, 0.0);
  c.tilde_p.assign(n, 0.0);

  c.p0[0] = 1.0;
  if (n > 1)
    c.p0[1] = x;
  for (int l = 1; l + 1 < n; ++l)
    c.p0[l + 1] = ((2.0 * l + 1.0) * x * c.p0[l] - l * c.p0[l - 1]) / (l + 1.0);

  if (n > 1)
    c.p1_sin[1] = 1.0;
  if (n > 2)
    c.p1_sin[2] = 3.0 * x;
  for (int l = 2; l + 1 < n; ++l)
    c.p1_sin[l + 1] = ((2.0 * l + 1.0) * x * c.p1_sin[l] - (l + 1.0) * c.p1_sin[l - 1]) / l;

  for (int l = 0; l < n; ++l) {
    c.p1[l] = s * c.p1_sin[l];
    c.dp0[l] = -c.p1[l];
    c.tilde_p[l] = l * (l + 1.0) * c.p0[l] - x * c.p1_sin[l];
    c.dp1[l] = c.tilde_p[l];
  }
  return c;
}

double airy_ai_neg(double x) {
  if (x < 0.0 || !std::isfinite(x))
    throw Error(ErrorCode::Domain, "airy_ai_neg requires finite x >= 0");
  if (x <= 3.0) {
    constexpr double ai0 = 0.35502805388781723926;
    constexpr double aip0 = 0.25881940379280679840; // -Ai'(0)
    const double z = -x;
    const double z3 = z * z * z;
    double f = 0.0;
    double g = 0.0;
    double tf = 1.0;
    double tg = z;
    for (int k = 0; k < 60; ++k) {
      f += tf;
      g += tg;
      tf *= z3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
      tg *= z3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
      if (std::abs(tf) < 1e-18 * std::abs(f) && std::abs(tg) < 1e-18 * (std::abs(g) + 1e-300))
        break;
    }
    return ai0 * f - aip0 * g;
  }
  // Ai(-x) = (sqrt(x)/2) [J_{1/3}(zeta) - Y_{1/3}(zeta)/sqrt(3)], zeta = 2/3 x^{3/2}.
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double nu = 1.0 / 3.0;
  return 0.5 * std::sqrt(x) *
         (std::cyl_bessel_j(nu, zeta) - std::cyl_neumann(nu, zeta) / std::numbers::sqrt3);
}

std::vector<double> airy_neg_roots(int count) {
  if (count < 1 || count > 20)
    throw Error(ErrorCode::InvalidArgument, "airy_neg_roots supports 1 <= count <= 20");
  std::vector<double> roots;
  roots.reserve(count);
  for (int i = 1; i <= count; ++i) {
    const double seed = std::pow(3.0 * std::numbers::pi * (4.0 * i - 1.0) / 8.0, 2.0 / 3.0);
    double width = 0.3;
    double a = std::max(0.0, seed - width);
    double b = seed + width;
    double fa = airy_ai_neg(a);
    double fb = airy_ai_neg(b);
    while (fa * fb > 0.0 && width < 2.0) {
      width *= 1.5;
      a = std::max(0.0, seed - width);
      b = seed + width;
      fa = airy_ai_neg(a);
      fb = airy_ai_neg(b);
    }
    if (fa * fb > 0.0)
      throw Error(ErrorCode::NoConvergence, "could not bracket an Airy root");
    for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = airy_ai_neg(m);
      if (fm == 0.0) {
        a = b = m;
        break;
      }
      if ((fm > 0.0) == (fa > 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

} // namespace sphereqed
