#include "sphereqed/atom.hpp"

#include <cmath>
#include <numbers>

#include "series.hpp"
#include "sphereqed/error.hpp"
#include "sphereqed/units.hpp"

namespace sphereqed {

std::string_view to_string(Orientation o) {
  return o == Orientation::Radial ? "radial" : "tangential";
}

void validate(const AtomConfig &atom, double radius) {
  if (!(radius > 0.0))
    throw Error(ErrorCode::InvalidArgument, "sphere radius must be > 0");
  if (!(atom.omega_a > 0.0) || !std::isfinite(atom.omega_a))
    throw Error(ErrorCode::InvalidArgument, "atomic transition frequency must be > 0");
  if (!(atom.r_a > radius))
    throw Error(ErrorCode::InvalidArgument, "atom must be outside the sphere");
  if (std::abs((atom.r_a - radius) - atom.delta_r) > 1e-12 * std::max(1.0, atom.r_a))
    throw Error(ErrorCode::InvalidArgument, "delta_r must equal r_a - R");
  if (atom.delta_r < min_delta_r * (1.0 - 1e-12))
    throw Error(ErrorCode::InvalidArgument, "atom-surface distance below 1e-4 lambda_ref");
}

namespace {

DecayResult series(const MaterialModel &model, double radius, const AtomConfig &atom,
                   const SeriesOptions &opts) {
  validate(atom, radius);
  const double w = atom.omega_a;
  const cplx x = w * to_natural_length(atom.r_a);
  const cplx n = index_at(model, w);
  const double z1 = w * to_natural_length(radius);
  const bool radial = atom.orientation == Orientation::Radial;
  const double rate_pref = radial ? 1.5 : 0.75;
  const double shift_pref = radial ? 0.75 : 0.375;

  auto build = [&](int L) {
    const MieContext ctx(model, radius, w, L);
    const SphericalBesselTable ta(x, L);
    std::vector<cplx> terms(L);
    const cplx inv_x = 1.0 / x;
    for (int l = 1; l <= L; ++l) {
      const double ld = l;
      cplx t = 0.0;
      if (radial) {
        if (opts.include_tm) {
          const ScaledComplex hx = ta.h(l) * inv_x;
          t = ld * (ld + 1.0) * (2.0 * ld + 1.0) * (ctx.bn_scaled(l) * hx * hx).value_or_saturate();
        }
      } else {
        cplx s = 0.0;
        if (opts.include_te) {
          const ScaledComplex h = ta.h(l);
          s += (ctx.bm_scaled(l) * h * h).value_or_saturate();
        }
        if (opts.include_tm) {
          const ScaledComplex dx = ta.hr(l) * inv_x;
          s += (ctx.bn_scaled(l) * dx * dx).value_or_saturate();
        }
        t = (2.0 * ld + 1.0) * s;
      }
      terms[l - 1] = t;
    }
    return terms;
  };

  detail::SeriesSum s;
  if (opts.l_max > 0) {
    const auto terms = build(opts.l_max);
    for (const auto &t : terms)
      s.sum += t;
    s.l_max_used = opts.l_max;
    s.tail = detail::extrapolated_tail(terms);
    s.converged = true;
  } else {
    const double xs = std::max({z1, std::abs(n) * z1, std::abs(x)});
    // Judge the tail against the rate as well as |S|, so the reported
    // A/A0 carries the tail bound honestly even when Im S dominates.
    s = detail::adaptive_series(truncation_order(xs), build, [&](cplx sum) {
      return std::min(std::abs(sum), std::abs(1.0 + rate_pref * sum.real()) / rate_pref);
    });
  }

  DecayResult out;
  out.rate_ratio = 1.0 + rate_pref * s.sum.real();
  out.shift_ratio = -shift_pref * s.sum.imag();
  out.l_max_used = s.l_max_used;
  out.tail_estimate = rate_pref * s.tail;
  out.converged = s.converged;
  return out;
}

} // namespace

DecayResult decay_rate(const MaterialModel &model, double radius, const AtomConfig &atom,
                       const SeriesOptions &opts) {
  return series(model, radius, atom, opts);
}

DecayResult lamb_shift(const MaterialModel &model, double radius, const AtomConfig &atom,
                       const SeriesOptions &opts) {
  return series(model, radius, atom, opts);
}

std::pair<double, double> decay_rate_near_surface(const MaterialModel &model, double radius,
                                                  const AtomConfig &atom) {
  validate(atom, radius);
  const cplx eps = permittivity(model, atom.omega_a).value;
  const double k = atom.omega_a;
  const double dr = to_natural_length(atom.delta_r);
  const double rn = to_natural_length(radius);
  const double f = eps.imag() / std::norm(eps + 1.0) / (k * k * k);
  const double perp = 0.75 * f / (dr * dr * dr);
  const double par = 0.375 * f * (1.0 / (dr * dr * dr) + 1.0 / (2.0 * rn * rn * dr));
  return {perp, par};
}

std::pair<double, double> lamb_shift_near_surface(const MaterialModel &model, double radius,
                                                  const AtomConfig &atom) {
  validate(atom, radius);
  const cplx eps = permittivity(model, atom.omega_a).value;
  const double k = atom.omega_a;
  const double dr = to_natural_length(atom.delta_r);
  const double rn = to_natural_length(radius);
  const double f = (std::norm(eps) - 1.0) / std::norm(eps + 1.0) / (k * k * k);
  const double perp = 3.0 / 16.0 * f / (dr * dr * dr);
  const double par = 3.0 / 32.0 * f * (1.0 / (dr * dr * dr) + 1.0 / (2.0 * rn * rn * dr));
  return {perp, par};
}

double lorentzian_shift_model(double a_at_peak, double delta, double detuning) {
  if (!(delta > 0.0))
    throw Error(ErrorCode::InvalidArgument, "linewidth must be > 0");
  return -0.5 * a_at_peak * delta * detuning / (detuning * detuning + delta * delta);
}

cplx markov_amplitude(double rate, double shift, double t) {
  if (t < 0.0)
    throw Error(ErrorCode::InvalidArgument, "time must be >= 0");
  return std::exp(cplx(-0.5 * rate, shift) * t);
}

} // namespace sphereqed
