#include "sphereqed/sphereqed.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "sphereqed/atom.hpp"
#include "sphereqed/error.hpp"
#include "sphereqed/field.hpp"
#include "sphereqed/material.hpp"
#include "sphereqed/mie.hpp"
#include "sphereqed/resonance.hpp"

using namespace sphereqed;

struct sqed_sphere {
  MaterialModel model;
  double radius;
};

namespace {

thread_local std::string last_error;

sqed_status status_of(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidArgument:
    return SQED_ERR_INVALID_ARGUMENT;
  case ErrorCode::Domain:
    return SQED_ERR_DOMAIN;
  case ErrorCode::Range:
    return SQED_ERR_RANGE;
  case ErrorCode::NoConvergence:
    return SQED_ERR_NO_CONVERGENCE;
  case ErrorCode::BasinEscape:
    return SQED_ERR_BASIN_ESCAPE;
  case ErrorCode::WrongHalfPlane:
    return SQED_ERR_WRONG_HALF_PLANE;
  case ErrorCode::NoResonance:
    return SQED_ERR_NO_RESONANCE;
  case ErrorCode::Quadrature:
    return SQED_ERR_QUADRATURE;
  }
  return SQED_ERR_INTERNAL;
}

template <class Fn>
sqed_status guarded(Fn &&fn) {
  try {
    fn();
    last_error.clear();
    return SQED_OK;
  } catch (const Error &e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
    return SQED_ERR_INTERNAL;
  } catch (const std::exception &e) {
    last_error = e.what();
    return SQED_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return SQED_ERR_INTERNAL;
  }
}

void require(bool ok, const char *what) {
  if (!ok)
    throw Error(ErrorCode::InvalidArgument, what);
}

const sqed_sphere &deref(const sqed_sphere *s) {
  require(s != nullptr, "null sphere handle");
  return *s;
}

Polarization polarization(int pol) {
  require(pol == SQED_TE || pol == SQED_TM, "polarization must be SQED_TE or SQED_TM");
  return pol == SQED_TE ? Polarization::TE : Polarization::TM;
}

AtomConfig atom_config(const sqed_sphere &s, const sqed_atom *a) {
  require(a != nullptr, "null atom");
  require(a->orientation == SQED_RADIAL || a->orientation == SQED_TANGENTIAL,
          "orientation must be SQED_RADIAL or SQED_TANGENTIAL");
  return AtomConfig::near(s.radius, a->delta_r, a->omega_a,
                          a->orientation == SQED_RADIAL ? Orientation::Radial : Orientation::Tangential,
                          a->a0_over_omega);
}

void write(const Resonance &r, sqed_resonance *out) {
  out->omega_re = r.omega_c.real();
  out->omega_im = r.omega_c.imag();
  out->pol = r.pol == Polarization::TE ? SQED_TE : SQED_TM;
  out->l = r.l;
  out->radial_order = r.radial_order.value_or(0);
  out->kind = r.kind == ResonanceKind::WG ? SQED_WG : SQED_SG;
  out->delta_rad = r.delta_rad;
  out->delta_abs = r.delta_abs;
  out->q_tot = r.q_tot;
  out->q_rad = r.q_rad;
  out->q_abs = r.q_abs;
  out->residual = r.residual;
}

} // namespace

extern "C" {

const char *sqed_version(void) { return "1.0.0"; }

const char *sqed_status_string(sqed_status status) {
  switch (status) {
  case SQED_OK:
    return "ok";
  case SQED_ERR_INVALID_ARGUMENT:
    return to_string(ErrorCode::InvalidArgument);
  case SQED_ERR_DOMAIN:
    return to_string(ErrorCode::Domain);
  case SQED_ERR_RANGE:
    return to_string(ErrorCode::Range);
  case SQED_ERR_NO_CONVERGENCE:
    return to_string(ErrorCode::NoConvergence);
  case SQED_ERR_BASIN_ESCAPE:
    return to_string(ErrorCode::BasinEscape);
  case SQED_ERR_WRONG_HALF_PLANE:
    return to_string(ErrorCode::WrongHalfPlane);
  case SQED_ERR_NO_RESONANCE:
    return to_string(ErrorCode::NoResonance);
  case SQED_ERR_QUADRATURE:
    return to_string(ErrorCode::Quadrature);
  case SQED_ERR_INTERNAL:
    return "internal error";
  }
  return "unknown status";
}

const char *sqed_last_error(void) { return last_error.c_str(); }

sqed_status sqed_sphere_create(double omega_p, double omega_t, double gamma, double radius,
                               sqed_sphere **out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    const MaterialModel m{omega_p, omega_t, gamma};
    validate(m, true);
    require(radius > 0.0 && std::isfinite(radius), "radius must be finite and > 0");
    *out = new sqed_sphere{m, radius};
  });
}

sqed_status sqed_sphere_lossless(const sqed_sphere *s, sqed_sphere **out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = new sqed_sphere{deref(s).model.lossless(), s->radius};
  });
}

void sqed_sphere_destroy(sqed_sphere *s) { delete s; }

sqed_status sqed_permittivity(const sqed_sphere *s, double omega, double *re, double *im) {
  return guarded([&] {
    require(re && im, "null output pointer");
    const auto e = permittivity(deref(s).model, omega).value;
    *re = e.real();
    *im = e.imag();
  });
}

sqed_status sqed_refractive_index(const sqed_sphere *s, double omega, double *re, double *im) {
  return guarded([&] {
    require(re && im, "null output pointer");
    const auto n = refractive_index(permittivity(deref(s).model, omega));
    *re = n.real();
    *im = n.imag();
  });
}

sqed_status sqed_band_gap(const sqed_sphere *s, double *lower, double *upper, double *sg_bound) {
  return guarded([&] {
    require(lower && upper && sg_bound, "null output pointer");
    const BandGap g = band_gap(deref(s).model);
    *lower = g.lower;
    *upper = g.upper;
    *sg_bound = g.sg_bound;
  });
}

sqed_status sqed_classify_regime(const sqed_sphere *s, double omega, int *regime) {
  return guarded([&] {
    require(regime != nullptr, "null output pointer");
    switch (classify_regime(deref(s).model, omega)) {
    case Regime::BelowGap:
      *regime = SQED_BELOW_GAP;
      break;
    case Regime::InGap:
      *regime = SQED_IN_GAP;
      break;
    case Regime::AboveGap:
      *regime = SQED_ABOVE_GAP;
      break;
    }
  });
}

sqed_status sqed_mie_coefficients(const sqed_sphere *s, double omega, int l, sqed_mie *out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    const MieCoefficientSet c = mie_coefficients(deref(s).model, s->radius, omega, l);
    *out = {c.bm.real(), c.bm.imag(), c.bn.real(), c.bn.imag(),
            c.cm.real(), c.cm.imag(), c.cn.real(), c.cn.imag()};
  });
}

sqed_status sqed_characteristic(const sqed_sphere *s, double omega_re, double omega_im, int l,
                                int pol, double *re, double *im) {
  return guarded([&] {
    require(re && im, "null output pointer");
    const CharacteristicValue v =
        characteristic(deref(s).model, s->radius, cplx(omega_re, omega_im), l, polarization(pol));
    *re = v.value.real();
    *im = v.value.imag();
  });
}

sqed_status sqed_fluctuation_prr(const sqed_sphere *s, double omega, double r, double *out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = fluctuation_prr(deref(s).model, s->radius, omega, r);
  });
}

sqed_status sqed_find_wg(const sqed_sphere *s, int l, int radial_order, int pol,
                         sqed_resonance *out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    write(find_wg(deref(s).model, s->radius, l, radial_order, polarization(pol)), out);
  });
}

sqed_status sqed_find_sg(const sqed_sphere *s, int l, sqed_resonance *out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    write(find_sg(deref(s).model, s->radius, l), out);
  });
}

sqed_status sqed_q_abs_closed_form(double n_re, double n_im, double nu, int pol, int kind,
                                   double *out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    require(kind == SQED_WG || kind == SQED_SG, "kind must be SQED_WG or SQED_SG");
    *out = q_abs_closed_form(RefractiveIndex{cplx(n_re, n_im)}, nu, polarization(pol),
                             kind == SQED_WG ? ResonanceKind::WG : ResonanceKind::SG);
  });
}

sqed_status sqed_linewidth_taylor(const sqed_sphere *s, int l, int pol, double omega,
                                  int derivative, double *out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    require(derivative == 0 || derivative == 1, "derivative must be 0 or 1");
    *out = linewidth_taylor(deref(s).model, s->radius, l, polarization(pol), omega,
                            derivative == 0 ? TaylorDerivative::Nondispersive
                                            : TaylorDerivative::Numerical);
  });
}

sqed_status sqed_count_roots(const sqed_sphere *s, int l, int pol, double re_min, double re_max,
                             double im_min, double im_max, int *count) {
  return guarded([&] {
    require(count != nullptr, "null output pointer");
    *count = count_roots(deref(s).model, s->radius, l, polarization(pol),
                         {re_min, re_max, im_min, im_max});
  });
}

sqed_status sqed_decay_rate(const sqed_sphere *s, const sqed_atom *atom, sqed_decay *out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    const DecayResult d = decay_rate(deref(s).model, s->radius, atom_config(*s, atom));
    *out = {d.rate_ratio, d.shift_ratio, d.l_max_used, d.tail_estimate, d.converged ? 1 : 0};
  });
}

sqed_status sqed_near_surface(const sqed_sphere *s, const sqed_atom *atom, double *rate_perp,
                              double *rate_par, double *shift_perp, double *shift_par) {
  return guarded([&] {
    require(rate_perp && rate_par && shift_perp && shift_par, "null output pointer");
    const AtomConfig a = atom_config(deref(s), atom);
    const auto rate = decay_rate_near_surface(s->model, s->radius, a);
    const auto shift = lamb_shift_near_surface(s->model, s->radius, a);
    *rate_perp = rate.first;
    *rate_par = rate.second;
    *shift_perp = shift.first;
    *shift_par = shift.second;
  });
}

sqed_status sqed_pattern(const sqed_sphere *s, const sqed_atom *atom, double r, size_t n,
                         const double *theta, const double *phi, double *values, int *l_max_used) {
  return guarded([&] {
    require(n > 0 && theta && phi && values, "pattern needs nonempty input and output arrays");
    std::vector<AngularPoint> grid(n);
    for (size_t k = 0; k < n; ++k)
      grid[k] = {theta[k], phi[k]};
    const EmissionPattern p = far_field_pattern(deref(s).model, s->radius, atom_config(*s, atom), r, grid);
    std::copy(p.values.begin(), p.values.end(), values);
    if (l_max_used)
      *l_max_used = p.l_max_used;
  });
}

sqed_status sqed_find_lobes(const double *values, size_t n, double rel_prominence, size_t *indices,
                            size_t cap, size_t *count) {
  return guarded([&] {
    require(values != nullptr && count != nullptr, "null pointer");
    require(cap == 0 || indices != nullptr, "null index array");
    const auto lobes = find_lobes(std::vector<double>(values, values + n), rel_prominence);
    *count = lobes.size();
    for (size_t k = 0; k < lobes.size() && k < cap; ++k)
      indices[k] = lobes[k];
  });
}

sqed_status sqed_radiated_fraction(const sqed_sphere *s, const sqed_atom *atom, double *value,
                                   int *series_terms) {
  return guarded([&] {
    require(value != nullptr, "null output pointer");
    const EnergyFraction f = radiated_fraction(deref(s).model, s->radius, atom_config(*s, atom));
    *value = f.value;
    if (series_terms)
      *series_terms = f.series_terms;
  });
}

sqed_status sqed_intensity_markov(const sqed_sphere *s, const sqed_atom *atom, double r,
                                  double theta, double phi, size_t n, const double *times,
                                  double *out) {
  return guarded([&] {
    require(n > 0 && times && out, "time evolution needs nonempty input and output arrays");
    const AtomConfig a = atom_config(deref(s), atom);
    for (size_t k = 0; k < n; ++k)
      out[k] = intensity_markov(s->model, s->radius, a, r, theta, phi, times[k]);
  });
}

sqed_status sqed_intensity_exact(const sqed_sphere *s, const sqed_atom *atom, double r,
                                 double theta, double phi, size_t n, const double *times,
                                 double delta, int threads, double *out) {
  return guarded([&] {
    require(n > 0 && times && out, "time evolution needs nonempty input and output arrays");
    ExactOptions opts;
    opts.delta = delta > 0.0 ? delta : 0.0;
    opts.threads = threads;
    const TimeTrace tr = intensity_exact(deref(s).model, s->radius, atom_config(*s, atom), r, theta,
                                         phi, std::vector<double>(times, times + n), opts);
    std::copy(tr.intensity.begin(), tr.intensity.end(), out);
  });
}

sqed_status sqed_estimate_linewidth(const sqed_sphere *s, const sqed_atom *atom, double *out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = estimate_linewidth(deref(s).model, s->radius, atom_config(*s, atom));
  });
}

} // extern "C"
