#include "sphereqed/resonance.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "sphereqed/error.hpp"
#include "sphereqed/specfun.hpp"
#include "sphereqed/units.hpp"

namespace sphereqed {

std::string_view to_string(ResonanceKind kind) { return kind == ResonanceKind::WG ? "WG" : "SG"; }

namespace {

std::string fmt(cplx z) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << z.real() << ", " << z.imag() << ")";
  return os.str();
}

// Wegstein-accelerated fixed point x = g(x). The plain iteration diverges
// for the WG relation near the gap, where |g'| is several times one.
cplx fixed_point(const std::function<cplx(cplx)> &g, cplx x0, const char *what) {
  constexpr int max_iter = 50;
  constexpr double tol = 1e-10;
  cplx x_prev = x0;
  cplx g_prev = g(x0);
  cplx x = g_prev;
  for (int it = 1; it < max_iter; ++it) {
    const cplx gx = g(x);
    if (std::abs(gx - x) < tol * std::max(1.0, std::abs(x)))
      return gx;
    const cplx dx = x - x_prev;
    cplx next = gx;
    if (std::abs(dx) > 0.0) {
      const cplx a = (gx - g_prev) / dx;
      if (std::abs(a - 1.0) > 1e-12) {
        const cplx q = a / (a - 1.0);
        next = q * x + (1.0 - q) * gx;
      }
    }
    x_prev = x;
    g_prev = gx;
    x = next;
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()) || x.real() <= 0.0)
      break;
  }
  std::ostringstream os;
  os << what << ": fixed-point iteration did not converge (last iterate " << fmt(x) << ")";
  throw Error(ErrorCode::NoConvergence, os.str());
}

// The fixed point is started from the root of Re g(w) - w on the real axis,
// bracketed on [lo, hi]. Scanning from hi downward picks the crossing
// nearest hi, which for the SG relation is the one with eps close to -1.
cplx bracketed_fixed_point(const std::function<cplx(cplx)> &g, double lo, double hi,
                           const char *what) {
  auto f = [&](double w) { return g(cplx(w, 0.0)).real() - w; };
  constexpr int samples = 400;
  double b = hi;
  double fb = f(b);
  double a = b;
  double fa = fb;
  bool found = false;
  for (int k = 1; k <= samples; ++k) {
    // Geometric spacing toward hi resolves the steep end of the SG relation.
    const double t = std::pow(1e-9, 1.0 - static_cast<double>(k) / samples);
    a = hi - (hi - lo) * t;
    fa = f(a);
    if (std::isfinite(fa) && std::isfinite(fb) && (fa > 0.0) != (fb > 0.0)) {
      found = true;
      break;
    }
    b = a;
    fb = fa;
  }
  if (!found) {
    std::ostringstream os;
    os << what << ": no real crossing of the asymptotic relation in [" << lo << ", " << hi << "]";
    throw Error(ErrorCode::NoConvergence, os.str());
  }
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  const double w0 = 0.5 * (a + b);
  try {
    return fixed_point(g, cplx(w0, 0.0), what);
  } catch (const Error &) {
    // Keep the real solution with the imaginary part of one map step.
    return {w0, g(cplx(w0, 0.0)).imag()};
  }
}

cplx m_value(const MaterialModel &model, double radius, int l, Polarization pol, cplx omega) {
  return characteristic(model, radius, omega, l, pol).value;
}

} // namespace

cplx wg_seed(const MaterialModel &model, double radius, int l, int i, Polarization pol) {
  if (l < 1 || i < 1 || i > 20)
    throw Error(ErrorCode::InvalidArgument, "wg_seed requires l >= 1 and 1 <= i <= 20");
  const double alpha = airy_neg_roots(i).back();
  const double nu = l + 0.5;
  const double rn = to_natural_length(radius);
  const double c13 = std::cbrt(0.5); // 2^{-1/3}
  auto f = [&](cplx n) {
    const cplx p = pol == Polarization::TE ? n : 1.0 / n;
    const cplx root = std::sqrt(n * n - 1.0);
    const cplx braces = nu + c13 * alpha * std::cbrt(nu) - p / root +
                        0.3 * c13 * c13 * alpha * alpha / std::cbrt(nu) -
                        c13 * p * (n * n - 2.0 * p * p / 3.0) / (root * root * root) * alpha /
                            std::pow(nu, 2.0 / 3.0);
    return braces / (rn * n);
  };
  auto g = [&](cplx omega) { return f(index_at(model, omega)); };
  if (model.is_metallic())
    throw Error(ErrorCode::NoResonance, "no WG branch below the gap of a metal");
  const cplx seed = bracketed_fixed_point(g, 1e-6 * model.omega_t, model.omega_t * (1.0 - 1e-9), "wg_seed");
  if (!(seed.real() > 0.0))
    throw Error(ErrorCode::NoConvergence, "wg_seed produced a non-positive frequency");
  return seed;
}

cplx sg_seed(const MaterialModel &model, double radius, int l) {
  if (l < 1)
    throw Error(ErrorCode::InvalidArgument, "sg_seed requires l >= 1");
  const BandGap gap = band_gap(model);
  const double nu = l + 0.5;
  const double rn = to_natural_length(radius);
  auto g = [&](cplx omega) {
    const cplx eps = permittivity_at(model, omega);
    return (nu * std::sqrt(1.0 + 1.0 / eps) +
            (eps * eps + eps + 1.0) / (2.0 * eps * std::sqrt(-eps - 1.0))) /
           rn;
  };
  cplx seed;
  try {
    const double lo = gap.lower > 0.0 ? gap.lower * (1.0 + 1e-9) : 1e-6 * gap.sg_bound;
    seed = bracketed_fixed_point(g, lo, gap.sg_bound * (1.0 - 1e-12), "sg_seed");
  } catch (const Error &) {
    std::ostringstream os;
    os << "no SG resonance for l = " << l << " (asymptotic relation has no solution)";
    throw Error(ErrorCode::NoResonance, os.str());
  }
  const double eps_r = permittivity_at(model, seed).real();
  if (!(seed.real() < gap.sg_bound) || !(eps_r < -1.0) || !(seed.real() > gap.lower)) {
    std::ostringstream os;
    os << "no SG resonance for l = " << l << " (seed " << fmt(seed)
       << " violates eps_R < -1)";
    throw Error(ErrorCode::NoResonance, os.str());
  }
  return seed;
}

Resonance refine_root(const MaterialModel &model, double radius, int l, Polarization pol,
                      cplx seed, const RootOptions &opts) {
  cplx w = seed;
  cplx m = m_value(model, radius, l, pol, w);
  cplx dm = 0.0;
  bool converged = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double h = 1e-7 * std::max(1.0, std::abs(w));
    dm = (m_value(model, radius, l, pol, w + h) - m_value(model, radius, l, pol, w - h)) / (2.0 * h);
    if (dm == cplx(0.0, 0.0) || !std::isfinite(std::abs(dm)))
      break;
    cplx step = -m / dm;
    // Keep Newton steps comparable to the basin; M has poles between roots.
    const double cap = 0.5 * opts.basin;
    if (std::abs(step) > cap)
      step *= cap / std::abs(step);
    cplx w_new = w + step;
    cplx m_new = m_value(model, radius, l, pol, w_new);
    for (int bt = 0; bt < 30 && !(std::abs(m_new) < std::abs(m)); ++bt) {
      step *= 0.5;
      w_new = w + step;
      m_new = m_value(model, radius, l, pol, w_new);
    }
    w = w_new;
    m = m_new;
    if (std::abs(m) < 1e-10 * std::abs(dm) * std::abs(w) && std::abs(step) < 1e-12) {
      converged = true;
      break;
    }
    if (std::abs(w - seed) > 2.0 * opts.basin)
      break;
  }
  std::ostringstream ctx;
  ctx << " (" << to_string(pol) << " l = " << l << ", seed " << fmt(seed) << ", last " << fmt(w) << ")";
  if (std::abs(w - seed) > opts.basin)
    throw Error(ErrorCode::BasinEscape, "root left the seed basin" + ctx.str());
  if (!converged)
    throw Error(ErrorCode::NoConvergence, "Newton iteration did not converge" + ctx.str());
  if (w.imag() >= 0.0 && w.imag() <= opts.real_axis_tolerance * std::abs(w))
    w = cplx(w.real(), -0.0);
  else if (!(w.imag() < 0.0))
    throw Error(ErrorCode::WrongHalfPlane, "root is not in the lower half-plane" + ctx.str());
  Resonance r;
  r.omega_c = w;
  r.pol = pol;
  r.l = l;
  r.residual = std::abs(m);
  return r;
}

std::pair<double, double> split_linewidth(const MaterialModel &model, double radius, int l,
                                          Polarization pol, const Resonance &res) {
  const MaterialModel clean = model.lossless();
  Resonance ll;
  try {
    RootOptions opts;
    opts.real_axis_tolerance = 1e-13;
    ll = refine_root(clean, radius, l, pol, res.omega_c, opts);
  } catch (const Error &e) {
    throw Error(e.code(), std::string("lossless solve: ") + e.what());
  }
  // Radiative widths below the clamp tolerance are not certified by the
  // residual test; they are reported as zero (Q_rad = inf).
  const double floor = 1e-13 * std::abs(ll.omega_c);
  const double delta_rad = ll.delta() > floor ? ll.delta() : 0.0;
  const double delta_abs = std::max(0.0, res.delta() - delta_rad);
  return {delta_rad, delta_abs};
}

double linewidth_taylor(const MaterialModel &model, double radius, int l, Polarization pol,
                        double omega, TaylorDerivative derivative) {
  if (!(omega > 0.0))
    throw Error(ErrorCode::Domain, "linewidth_taylor requires omega > 0");
  const cplx m = m_value(model, radius, l, pol, omega);
  if (derivative == TaylorDerivative::Numerical) {
    const double h = 1e-7 * std::max(1.0, omega);
    const cplx dm = (m_value(model, radius, l, pol, omega + h) -
                     m_value(model, radius, l, pol, omega - h)) / (2.0 * h);
    return (m / dm).imag();
  }
  const cplx eps = permittivity_at(model, omega);
  const double rn = to_natural_length(radius);
  const double nu = l + 0.5;
  const double x = omega * rn;
  cplx dm = eps - 1.0;
  if (pol == Polarization::TM)
    dm *= (1.0 + 1.0 / eps) * (nu / x) * (nu / x) - 1.0;
  // M' above is per unit x = omega R.
  return (m / dm).imag() / rn;
}

double q_abs_closed_form(const RefractiveIndex &n, double nu, Polarization pol, ResonanceKind kind) {
  const double nr = n.real();
  const double ni = n.imag();
  if (kind == ResonanceKind::WG) {
    if (!(nr > 1.0) || !(ni > 0.0) || !(ni < nr))
      throw Error(ErrorCode::Domain, "WG closed form needs n_R > 1 and 0 < n_I << n_R");
    if (!(nu > 0.0))
      throw Error(ErrorCode::InvalidArgument, "nu must be positive");
    const double p = pol == Polarization::TE ? nr : 1.0 / nr;
    const double lead = nr / (2.0 * ni);
    return lead + lead * (2.0 * nr - p) / std::pow(nr * nr - 1.0, 1.5) / nu;
  }
  if (pol != Polarization::TM)
    throw Error(ErrorCode::Domain, "SG resonances are TM only");
  if (!(ni > 1.0) || !(nr > 0.0) || !(nr < ni))
    throw Error(ErrorCode::Domain, "SG closed form needs n_I > 1 and 0 < n_R << n_I");
  return ni * (ni * ni - 1.0) / (2.0 * nr);
}

namespace {

void fill_quality(const MaterialModel &model, double radius, Resonance &r) {
  const auto [d_rad, d_abs] = split_linewidth(model, radius, r.l, r.pol, r);
  r.delta_rad = d_rad;
  r.delta_abs = d_abs;
  const double inf = std::numeric_limits<double>::infinity();
  const double om = r.omega();
  r.q_tot = om / (2.0 * r.delta());
  r.q_rad = d_rad > 0.0 ? om / (2.0 * d_rad) : inf;
  r.q_abs = d_abs > 0.0 ? om / (2.0 * d_abs) : inf;
}

} // namespace

Resonance find_wg(const MaterialModel &model, double radius, int l, int i, Polarization pol) {
  const cplx seed = wg_seed(model, radius, l, i, pol);
  Resonance r = refine_root(model, radius, l, pol, seed);
  r.kind = ResonanceKind::WG;
  r.radial_order = i;
  fill_quality(model, radius, r);
  return r;
}

Resonance find_sg(const MaterialModel &model, double radius, int l) {
  const cplx seed = sg_seed(model, radius, l);
  Resonance r = refine_root(model, radius, l, Polarization::TM, seed);
  const BandGap gap = band_gap(model);
  if (!(r.omega() < gap.sg_bound) || !(permittivity_at(model, r.omega()).real() < -1.0)) {
    std::ostringstream os;
    os << "no SG resonance for l = " << l << " (refined root " << fmt(r.omega_c)
       << " lies above the SG bound)";
    throw Error(ErrorCode::NoResonance, os.str());
  }
  r.kind = ResonanceKind::SG;
  r.radial_order.reset();
  fill_quality(model, radius, r);
  return r;
}

std::vector<Resonance> find_wg_series(const MaterialModel &model, double radius, int l,
                                      int count, Polarization pol) {
  std::vector<Resonance> out;
  for (int i = 1; i <= count; ++i) {
    Resonance r = find_wg(model, radius, l, i, pol);
    for (const Resonance &known : out) {
      if (std::abs(r.omega_c - known.omega_c) <= 10.0 * std::max(r.delta(), known.delta())) {
        std::ostringstream os;
        os << "radial order " << i << " converged onto an already accepted root " << fmt(known.omega_c);
        throw Error(ErrorCode::NoConvergence, os.str());
      }
    }
    out.push_back(r);
  }
  return out;
}

namespace {

// Phase of D(omega) / n^l; D is the Mie denominator, and the ratio is an
// even function of n, hence single valued away from the material pole.
double entire_phase(const MaterialModel &model, double radius, int l, Polarization pol, cplx w) {
  const MieContext ctx(model, radius, w, l);
  const ScaledComplex d = pol == Polarization::TM
                              ? ctx.eps() * ctx.inner().j(l) * ctx.outer().hr(l) -
                                    ctx.inner().jr(l) * ctx.outer().h(l)
                              : ctx.inner().jr(l) * ctx.outer().h(l) -
                                    ctx.inner().j(l) * ctx.outer().hr(l);
  if (d.is_zero())
    throw Error(ErrorCode::Quadrature, "contour passes through a root");
  const double phase = std::arg(d.mant) - l * std::arg(ctx.index());
  return phase;
}

double wrap(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0.0)
    a += two_pi;
  return a - std::numbers::pi;
}

} // namespace

int count_roots(const MaterialModel &model, double radius, int l, Polarization pol,
                const Rectangle &rect) {
  if (!(rect.re_max > rect.re_min) || !(rect.im_max > rect.im_min) || !(rect.re_min > 0.0))
    throw Error(ErrorCode::InvalidArgument, "invalid rectangle");
  const cplx corners[5] = {{rect.re_min, rect.im_min}, {rect.re_max, rect.im_min},
                           {rect.re_max, rect.im_max}, {rect.re_min, rect.im_max},
                           {rect.re_min, rect.im_min}};
  auto phase = [&](cplx w) { return entire_phase(model, radius, l, pol, w); };
  double total = 0.0;
  constexpr double max_jump = 0.5;
  constexpr int max_depth = 40;
  std::function<double(cplx, cplx, double, double, int)> segment =
      [&](cplx a, cplx b, double pa, double pb, int depth) -> double {
    const double d = wrap(pb - pa);
    if (std::abs(d) <= max_jump)
      return d;
    if (depth >= max_depth)
      throw Error(ErrorCode::Quadrature, "argument-principle contour passes too close to a root");
    const cplx m = 0.5 * (a + b);
    const double pm = phase(m);
    return segment(a, m, pa, pm, depth + 1) + segment(m, b, pm, pb, depth + 1);
  };
  for (int side = 0; side < 4; ++side) {
    const cplx a = corners[side];
    const cplx b = corners[side + 1];
    constexpr int base = 64;
    double pa = phase(a);
    for (int k = 1; k <= base; ++k) {
      const cplx q = a + (b - a) * (static_cast<double>(k) / base);
      const double pq = phase(q);
      total += segment(a + (b - a) * (static_cast<double>(k - 1) / base), q, pa, pq, 0);
      pa = pq;
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

} // namespace sphereqed
