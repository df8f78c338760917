#include "sphereqed/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "series.hpp"
#include "sphereqed/error.hpp"
#include "sphereqed/specfun.hpp"
#include "sphereqed/units.hpp"

namespace sphereqed {

namespace {

constexpr double pi = std::numbers::pi;

// Radial-basis coefficients of the emitted field, per l (index 0 is l = 1).
// Radial dipole:     F_r = sum cr P_l,  F_theta = sum ct P_l^1.
// Tangential dipole: F_r = cos(phi) sum cr P_l^1,
//                    F_theta = cos(phi) sum (cm P_l' + cn P~_l),
//                    F_phi = -sin(phi) sum (cm P~_l + cn P_l').
struct FieldCoefficients {
  Orientation orientation = Orientation::Radial;
  std::vector<cplx> cr, ct, cm, cn;
  int lmax = 0;
};

FieldCoefficients build_coefficients(const MaterialModel &model, double radius,
                                     const AtomConfig &atom, double omega, double r, int L,
                                     bool include_sphere) {
  const cplx xa = omega * to_natural_length(atom.r_a);
  const cplx x = omega * to_natural_length(r);
  const SphericalBesselTable ta(xa, L);
  const SphericalBesselTable tx(x, L);
  std::optional<MieContext> ctx;
  if (include_sphere)
    ctx.emplace(model, radius, omega, L);

  FieldCoefficients c;
  c.orientation = atom.orientation;
  c.lmax = L;
  c.cr.resize(L);
  c.ct.resize(L);
  if (atom.orientation == Orientation::Tangential) {
    c.cm.resize(L);
    c.cn.resize(L);
  }
  const cplx inv_xa = 1.0 / xa;
  const cplx inv_x = 1.0 / x;
  for (int l = 1; l <= L; ++l) {
    const double ld = l;
    const ScaledComplex hx = tx.h(l) * inv_x;
    const ScaledComplex dx = tx.hr(l) * inv_x;
    if (atom.orientation == Orientation::Radial) {
      ScaledComplex amp = ta.j(l);
      if (ctx)
        amp = amp + ctx->bn_scaled(l) * ta.h(l);
      amp = amp * ((2.0 * ld + 1.0) * inv_xa);
      c.cr[l - 1] = (amp * hx * cplx(ld * (ld + 1.0))).value_or_saturate();
      c.ct[l - 1] = -(amp * dx).value_or_saturate();
    } else {
      ScaledComplex bn = ta.jr(l);
      ScaledComplex bm = ta.j(l);
      if (ctx) {
        bn = bn + ctx->bn_scaled(l) * ta.hr(l);
        bm = bm + ctx->bm_scaled(l) * ta.h(l);
      }
      bn = bn * inv_xa;
      const double w = (2.0 * ld + 1.0) / (ld * (ld + 1.0));
      c.cr[l - 1] = (bn * hx * cplx(2.0 * ld + 1.0)).value_or_saturate();
      c.cm[l - 1] = (bm * tx.h(l) * cplx(w)).value_or_saturate();
      c.cn[l - 1] = (bn * dx * cplx(w)).value_or_saturate();
    }
  }
  return c;
}

double coefficient_size(const FieldCoefficients &c, int idx) {
  double m = std::abs(c.cr[idx]) + std::abs(c.ct.empty() ? 0.0 : std::abs(c.ct[idx]));
  if (!c.cm.empty())
    m += std::abs(c.cm[idx]) + std::abs(c.cn[idx]);
  return m;
}

FieldCoefficients converged_coefficients(const MaterialModel &model, double radius,
                                         const AtomConfig &atom, double omega, double r,
                                         const FieldOptions &opts) {
  if (opts.l_max > 0)
    return build_coefficients(model, radius, atom, omega, r, opts.l_max, opts.include_sphere);
  const cplx n = index_at(model, omega);
  const double z1 = omega * to_natural_length(radius);
  const double xa = omega * to_natural_length(atom.r_a);
  int L = std::max(8, truncation_order(std::max({z1, std::abs(n) * z1, xa})));
  for (;;) {
    FieldCoefficients c = build_coefficients(model, radius, atom, omega, r, L, opts.include_sphere);
    double peak = 0.0;
    for (int k = 0; k < L; ++k)
      peak = std::max(peak, coefficient_size(c, k));
    bool small = true;
    for (int k = L - 3; k < L; ++k)
      small = small && coefficient_size(c, k) <= detail::term_threshold * peak;
    if (small || peak == 0.0)
      return c;
    if (L >= detail::series_cap)
      throw Error(ErrorCode::NoConvergence, "emission-field series did not converge");
    L = std::min(detail::series_cap, 2 * L);
  }
}

FieldVector evaluate(const FieldCoefficients &c, const LegendreColumns &p, double phi) {
  FieldVector f{0.0, 0.0, 0.0};
  if (c.orientation == Orientation::Radial) {
    for (int l = 1; l <= c.lmax; ++l) {
      f[0] += c.cr[l - 1] * p.p0[l];
      f[1] += c.ct[l - 1] * p.p1[l];
    }
    return f;
  }
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  for (int l = 1; l <= c.lmax; ++l) {
    f[0] += c.cr[l - 1] * p.p1[l];
    f[1] += c.cm[l - 1] * p.p1_sin[l] + c.cn[l - 1] * p.tilde_p[l];
    f[2] += c.cm[l - 1] * p.tilde_p[l] + c.cn[l - 1] * p.p1_sin[l];
  }
  f[0] *= cp;
  f[1] *= cp;
  f[2] *= -sp;
  return f;
}

void check_point(const AtomConfig &atom, double radius, double r) {
  validate(atom, radius);
  if (!(r > atom.r_a))
    throw Error(ErrorCode::InvalidArgument, "field point must lie beyond the atom (r > r_a)");
}

double norm2(const FieldVector &f) {
  return std::norm(f[0]) + std::norm(f[1]) + std::norm(f[2]);
}

} // namespace

FieldVector emission_field(const MaterialModel &model, double radius, const AtomConfig &atom,
                           double omega, double r, double theta, double phi,
                           const FieldOptions &opts) {
  check_point(atom, radius, r);
  if (!(omega > 0.0))
    throw Error(ErrorCode::Domain, "emission_field requires omega > 0");
  const FieldCoefficients c = converged_coefficients(model, radius, atom, omega, r, opts);
  return evaluate(c, legendre_columns(c.lmax, theta), phi);
}

std::vector<AngularPoint> default_pattern_grid(Orientation o, int theta_samples) {
  if (theta_samples < 2)
    throw Error(ErrorCode::InvalidArgument, "pattern grid needs at least two samples");
  std::vector<AngularPoint> grid;
  const std::vector<double> phis =
      o == Orientation::Radial ? std::vector<double>{0.0} : std::vector<double>{0.0, 0.5 * pi};
  for (double phi : phis)
    for (int k = 0; k < theta_samples; ++k)
      grid.push_back({pi * k / (theta_samples - 1), phi});
  return grid;
}

EmissionPattern far_field_pattern(const MaterialModel &model, double radius, const AtomConfig &atom,
                                  double r, const std::vector<AngularPoint> &grid,
                                  const FieldOptions &opts) {
  check_point(atom, radius, r);
  if (grid.empty())
    throw Error(ErrorCode::InvalidArgument, "pattern grid is empty");
  const FieldCoefficients c = converged_coefficients(model, radius, atom, atom.omega_a, r, opts);
  EmissionPattern out;
  out.grid = grid;
  out.orientation = atom.orientation;
  out.omega_a = atom.omega_a;
  out.r = r;
  out.r_a = atom.r_a;
  out.l_max_used = c.lmax;
  out.values.reserve(grid.size());
  double last_theta = std::numeric_limits<double>::quiet_NaN();
  LegendreColumns cols;
  for (const AngularPoint &pt : grid) {
    if (!(pt.theta >= 0.0 && pt.theta <= pi))
      throw Error(ErrorCode::InvalidArgument, "theta outside [0, pi]");
    if (pt.theta != last_theta) {
      cols = legendre_columns(c.lmax, pt.theta);
      last_theta = pt.theta;
    }
    out.values.push_back(norm2(evaluate(c, cols, pt.phi)));
  }
  return out;
}

std::vector<std::size_t> find_lobes(const std::vector<double> &v, double rel_prominence) {
  std::vector<std::size_t> lobes;
  if (v.size() < 3)
    return lobes;
  const double top = *std::max_element(v.begin(), v.end());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (!(v[i] > v[i - 1] && v[i] > v[i + 1]))
      continue;
    double left = v[i];
    for (std::size_t k = i; k-- > 0;) {
      if (v[k] > v[i])
        break;
      left = std::min(left, v[k]);
    }
    double right = v[i];
    for (std::size_t k = i + 1; k < v.size(); ++k) {
      if (v[k] > v[i])
        break;
      right = std::min(right, v[k]);
    }
    if (v[i] - std::max(left, right) >= rel_prominence * top)
      lobes.push_back(i);
  }
  return lobes;
}

EnergyFraction radiated_fraction(const MaterialModel &model, double radius, const AtomConfig &atom) {
  validate(atom, radius);
  if (atom.orientation != Orientation::Radial)
    throw Error(ErrorCode::InvalidArgument, "radiated fraction is defined for a radial dipole");
  const double w = atom.omega_a;
  const cplx xa = w * to_natural_length(atom.r_a);
  const cplx n = index_at(model, w);
  const double z1 = w * to_natural_length(radius);

  auto build = [&](int L) {
    const MieContext ctx(model, radius, w, L);
    const SphericalBesselTable ta(xa, L);
    std::vector<cplx> terms(L);
    for (int l = 1; l <= L; ++l) {
      const double ld = l;
      const ScaledComplex amp = (ta.j(l) + ctx.bn_scaled(l) * ta.h(l)) * (1.0 / xa);
      terms[l - 1] = ld * (ld + 1.0) * (2.0 * ld + 1.0) * std::exp(2.0 * amp.log_abs());
    }
    return terms;
  };
  const detail::SeriesSum s =
      detail::adaptive_series(truncation_order(std::max({z1, std::abs(n) * z1, std::abs(xa)})), build);
  if (!s.converged)
    throw Error(ErrorCode::NoConvergence, "radiated-fraction series did not converge");
  const DecayResult rate = decay_rate(model, radius, atom);
  if (!rate.converged)
    throw Error(ErrorCode::NoConvergence, "decay-rate series did not converge");
  return {1.5 * s.sum.real() / rate.rate_ratio, w, atom.delta_r, s.l_max_used};
}

double intensity_markov(const MaterialModel &model, double radius, const AtomConfig &atom, double r,
                        double theta, double phi, double t) {
  if (t < 0.0)
    throw Error(ErrorCode::InvalidArgument, "time must be >= 0");
  const EmissionPattern p = far_field_pattern(model, radius, atom, r, {{theta, phi}});
  if (t == 0.0)
    return p.values[0];
  if (!(atom.a0_over_omega > 0.0))
    throw Error(ErrorCode::InvalidArgument, "a0_over_omega must be > 0 for time evolution");
  const DecayResult d = decay_rate(model, radius, atom);
  const double a = d.rate_ratio * atom.a0_over_omega;
  return p.values[0] * std::exp(-a * t);
}

double estimate_linewidth(const MaterialModel &model, double radius, const AtomConfig &atom) {
  auto rate = [&](double w) {
    AtomConfig a = atom;
    a.omega_a = w;
    return decay_rate(model, radius, a).rate_ratio;
  };
  const double peak = rate(atom.omega_a);
  auto half_point = [&](double sign) {
    double lo = 0.0;
    double hi = 1e-7;
    while (rate(atom.omega_a + sign * hi) > 0.5 * peak) {
      lo = hi;
      hi *= 2.0;
      if (hi > 0.05 * atom.omega_a)
        throw Error(ErrorCode::NoResonance, "no half-maximum of the decay rate near omega_a");
    }
    for (int it = 0; it < 60 && hi - lo > 1e-6 * hi; ++it) {
      const double m = 0.5 * (lo + hi);
      if (rate(atom.omega_a + sign * m) > 0.5 * peak)
        lo = m;
      else
        hi = m;
    }
    return 0.5 * (lo + hi);
  };
  return 0.5 * (half_point(1.0) + half_point(-1.0));
}

namespace {

using GreenSample = std::array<double, 3>;

// Evaluates fn over `points` with up to `workers` threads; results keep the
// input order so the outcome does not depend on the thread count.
template <class Fn>
std::vector<GreenSample> evaluate_batch(const std::vector<double> &points, int workers, Fn fn) {
  std::vector<GreenSample> out(points.size());
  const std::size_t n = points.size();
  const std::size_t used = std::min<std::size_t>(std::max(1, workers), std::max<std::size_t>(1, n / 16));
  if (used <= 1) {
    for (std::size_t k = 0; k < n; ++k)
      out[k] = fn(points[k]);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(used);
  const std::size_t chunk = (n + used - 1) / used;
  for (std::size_t t = 0; t < used; ++t) {
    const std::size_t b = std::min(n, t * chunk);
    const std::size_t e = std::min(n, b + chunk);
    pool.emplace_back([&, b, e, t] {
      try {
        for (std::size_t k = b; k < e; ++k)
          out[k] = fn(points[k]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto &th : pool)
    th.join();
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
}

// int_{-1}^{1} s^k e^{-i theta s} ds for k = 0, 1, 2.
std::array<cplx, 3> phase_moments(double th) {
  if (std::abs(th) < 1.0) {
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    double even = 1.0;     // theta^{2n} / (2n)!
    double odd = th;       // theta^{2n+1} / (2n+1)!
    for (int k = 0; k < 14; ++k) {
      const double sign = k % 2 ? -1.0 : 1.0;
      m0 += sign * even * 2.0 / (2 * k + 1);
      m2 += sign * even * 2.0 / (2 * k + 3);
      m1 += sign * odd * 2.0 / (2 * k + 3);
      even *= th * th / ((2 * k + 1) * (2 * k + 2));
      odd *= th * th / ((2 * k + 2) * (2 * k + 3));
    }
    return {m0, cplx(0.0, -m1), m2};
  }
  const double s = std::sin(th);
  const double c = std::cos(th);
  return {2.0 * s / th, cplx(0.0, -2.0 * (s - th * c) / (th * th)),
          2.0 * ((th * th - 2.0) * s + 2.0 * th * c) / (th * th * th)};
}

// Sine integral Si(x): power series for small x, continued fraction for
// E1(ix) otherwise.
double sine_integral(double x) {
  const double ax = std::abs(x);
  double v;
  if (ax < 2.0) {
    v = 0.0;
    double term = ax;
    for (int k = 0; k < 30; ++k) {
      v += term / (2 * k + 1);
      term *= -ax * ax / ((2 * k + 2) * (2 * k + 3));
    }
  } else {
    // modified Lentz on E1(z) = e^{-z} / (z + 1 / (1 + 1 / (z + 2 / (1 + ...))))
    const cplx z(0.0, ax);
    cplx b = z + 1.0, c = 1.0 / 1e-300, d = 1.0 / b, h = d;
    for (int i = 1; i < 200; ++i) {
      const double an = -static_cast<double>(i) * i;
      b += 2.0;
      d = 1.0 / (an * d + b);
      c = b + an / c;
      const cplx del = c * d;
      h *= del;
      if (std::abs(del - 1.0) < 1e-16)
        break;
    }
    const cplx e1 = h * std::polar(1.0, -ax);
    v = std::numbers::pi / 2 + e1.imag();
  }
  return x < 0.0 ? -v : v;
}

struct Panel {
  double a = 0.0, b = 0.0;
  GreenSample fa{}, fm{}, fb{};
};

} // namespace

TimeTrace intensity_exact(const MaterialModel &model, double radius, const AtomConfig &atom, double r,
                          double theta, double phi, const std::vector<double> &times,
                          const ExactOptions &opts) {
  check_point(atom, radius, r);
  if (!(atom.a0_over_omega > 0.0))
    throw Error(ErrorCode::InvalidArgument, "a0_over_omega must be > 0 for time evolution");
  if (times.empty())
    throw Error(ErrorCode::InvalidArgument, "time grid is empty");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw Error(ErrorCode::InvalidArgument, "times must be finite and >= 0");
  if (!(opts.panel_tolerance > 0.0))
    throw Error(ErrorCode::InvalidArgument, "panel tolerance must be > 0");

  const double wa = atom.omega_a;
  const double a0 = atom.a0_over_omega;
  const DecayResult d = decay_rate(model, radius, atom);
  const double rate = d.rate_ratio * a0;
  const double shift = d.shift_ratio * a0;
  const double delta = opts.delta > 0.0 ? opts.delta : estimate_linewidth(model, radius, atom);
  const double window = std::max(50.0 * delta, 200.0 * a0);
  if (window >= wa)
    throw Error(ErrorCode::InvalidArgument, "frequency window reaches omega = 0");

  // Im G_i(omega) = omega Re S_i(omega) / (4 pi), sampled at detuning det.
  const FieldOptions fopts;
  auto green = [&](double det) {
    const double w = wa + det;
    const FieldVector s = emission_field(model, radius, atom, w, r, theta, phi, fopts);
    GreenSample g;
    for (int i = 0; i < 3; ++i)
      g[i] = w * s[i].real() / (4.0 * pi);
    return g;
  };
  auto pole = [&](double det) { return 1.0 / cplx(-0.5 * rate, det + shift); };
  auto simpson = [&](double a, double b, const GreenSample &fa, const GreenSample &fm,
                     const GreenSample &fb) {
    std::array<cplx, 3> s;
    const double m = 0.5 * (a + b);
    for (int i = 0; i < 3; ++i)
      s[i] = (b - a) / 6.0 * (fa[i] * pole(a) + 4.0 * fm[i] * pole(m) + fb[i] * pole(b));
    return s;
  };

  // Initial uniform panels; the even count keeps det = 0 on a breakpoint.
  const int initial = 400;
  std::vector<double> pts(2 * initial + 1);
  for (int k = 0; k <= 2 * initial; ++k)
    pts[k] = window * (static_cast<double>(k) / initial - 1.0);
  pts[initial] = 0.0;
  std::vector<GreenSample> vals = evaluate_batch(pts, opts.threads, green);
  std::size_t evaluations = pts.size();

  std::vector<Panel> active;
  for (int k = 0; k < initial; ++k)
    active.push_back({pts[2 * k], pts[2 * k + 2], vals[2 * k], vals[2 * k + 1], vals[2 * k + 2]});
  double scale = 0.0;
  for (const Panel &p : active) {
    const auto s = simpson(p.a, p.b, p.fa, p.fm, p.fb);
    for (int i = 0; i < 3; ++i)
      scale += std::abs(s[i]);
  }
  if (!(scale > 0.0))
    throw Error(ErrorCode::Quadrature, "Green tensor vanishes across the frequency window");

  std::vector<Panel> leaves;
  while (!active.empty()) {
    auto fail = [&](const Panel &p, const char *why) {
      std::ostringstream os;
      os << why << " on panel [" << wa + p.a << ", " << wa + p.b << "]";
      throw Error(ErrorCode::Quadrature, os.str());
    };
    if (evaluations + 2 * active.size() > opts.max_evaluations)
      fail(active.front(), "frequency quadrature exceeded its evaluation budget");
    pts.clear();
    for (const Panel &p : active) {
      if (p.b - p.a < 1e-14 * wa)
        fail(p, "frequency quadrature could not meet its tolerance");
      pts.push_back(0.75 * p.a + 0.25 * p.b);
      pts.push_back(0.25 * p.a + 0.75 * p.b);
    }
    vals = evaluate_batch(pts, opts.threads, green);
    evaluations += pts.size();
    std::vector<Panel> next;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const Panel &p = active[k];
      const double m = 0.5 * (p.a + p.b);
      const Panel left{p.a, m, p.fa, vals[2 * k], p.fm};
      const Panel right{m, p.b, p.fm, vals[2 * k + 1], p.fb};
      const auto whole = simpson(p.a, p.b, p.fa, p.fm, p.fb);
      const auto sl = simpson(left.a, left.b, left.fa, left.fm, left.fb);
      const auto sr = simpson(right.a, right.b, right.fa, right.fm, right.fb);
      double err = 0.0;
      for (int i = 0; i < 3; ++i)
        err += std::abs(sl[i] + sr[i] - whole[i]);
      if (err <= 15.0 * opts.panel_tolerance * scale) {
        leaves.push_back(left);
        leaves.push_back(right);
      } else {
        next.push_back(left);
        next.push_back(right);
      }
    }
    active = std::move(next);
  }
  std::sort(leaves.begin(), leaves.end(), [](const Panel &x, const Panel &y) { return x.a < y.a; });

  // Principal value of int_W Im G / det; the window is symmetric, so the
  // subtraction of Im G(omega_a) adds no logarithm.
  GreenSample f0{};
  for (const Panel &p : leaves)
    if (p.a == 0.0)
      f0 = p.fa;
  std::array<double, 3> pv{};
  for (const Panel &p : leaves) {
    for (int i = 0; i < 3; ++i) {
      if (p.a == 0.0) {
        pv[i] += 2.0 * (p.fm[i] - f0[i]);
      } else if (p.b == 0.0) {
        pv[i] -= 2.0 * (p.fm[i] - f0[i]);
      } else {
        const double m = 0.5 * (p.a + p.b);
        pv[i] += (p.b - p.a) / 6.0 *
                 ((p.fa[i] - f0[i]) / p.a + 4.0 * (p.fm[i] - f0[i]) / m + (p.fb[i] - f0[i]) / p.b);
      }
    }
  }
  const FieldVector s_a = emission_field(model, radius, atom, wa, r, theta, phi, fopts);
  std::array<double, 3> bg{};
  for (int i = 0; i < 3; ++i)
    bg[i] = pi * (-wa * s_a[i].imag() / (4.0 * pi)) - pv[i];

  // Quadratic interpolant of Im G * pole on each leaf in s in [-1, 1].
  struct Interp {
    double centre, half;
    std::array<std::array<cplx, 3>, 3> q; // q[i] = {c0, c1, c2}
  };
  std::vector<Interp> interp;
  interp.reserve(leaves.size());
  std::array<cplx, 3> resonant{};
  for (const Panel &p : leaves) {
    Interp it{0.5 * (p.a + p.b), 0.5 * (p.b - p.a), {}};
    const cplx da = pole(p.a), dm = pole(it.centre), db = pole(p.b);
    for (int i = 0; i < 3; ++i) {
      const cplx um = p.fa[i] * da, u0 = p.fm[i] * dm, up = p.fb[i] * db;
      it.q[i] = {u0, 0.5 * (up - um), 0.5 * (up - 2.0 * u0 + um)};
      resonant[i] += it.half * (2.0 * it.q[i][0] + 2.0 / 3.0 * it.q[i][2]);
    }
    interp.push_back(it);
  }

  TimeTrace out;
  out.method = TraceMethod::Exact;
  out.times = times;
  out.frequency_samples = evaluations + 1;
  out.intensity.reserve(times.size());
  for (double t : times) {
    const cplx cu = markov_amplitude(rate, shift, t);
    // The spectrum outside the window enters through bg. Its free part is
    // bg at t = 0 and dephases like a flat band edge, 1 - (2/pi) Si(W t).
    const double tail = 1.0 - 2.0 / pi * sine_integral(window * t);
    std::array<cplx, 3> free{};
    for (const Interp &it : interp) {
      const auto mom = phase_moments(it.half * t);
      const cplx ph = it.half * std::polar(1.0, -it.centre * t);
      for (int i = 0; i < 3; ++i)
        free[i] += ph * (it.q[i][0] * mom[0] + it.q[i][1] * mom[1] + it.q[i][2] * mom[2]);
    }
    double intensity = 0.0;
    for (int i = 0; i < 3; ++i) {
      const cplx amp = 4.0 / wa * (cu * resonant[i] - free[i] - cplx(0.0, 1.0) * (cu - tail) * bg[i]);
      intensity += std::norm(amp);
    }
    out.intensity.push_back(intensity);
  }
  return out;
}

} // namespace sphereqed
