#include "sphereqed/mie.hpp"

#include <cmath>
#include <sstream>

#include "series.hpp"
#include "sphereqed/error.hpp"
#include "sphereqed/units.hpp"

namespace sphereqed {

std::string_view to_string(Polarization pol) { return pol == Polarization::TE ? "TE" : "TM"; }

cplx index_at(const MaterialModel &model, cplx omega) {
  const cplx eps = permittivity_at(model, omega);
  if (omega.imag() == 0.0)
    return refractive_index(eps).value;
  return std::sqrt(eps);
}

int truncation_order(double x, int pad) {
  return static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 2.0)) + pad;
}

namespace {

void check_frequency(cplx omega) {
  if (!(omega.real() > 0.0) || !std::isfinite(omega.imag()))
    throw Error(ErrorCode::Domain, "Mie coefficients require Re omega > 0");
}

void check_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw Error(ErrorCode::InvalidArgument, "sphere radius must be > 0");
}

} // namespace

MieContext::MieContext(const MaterialModel &model, double radius, cplx omega, int lmax)
    : omega_(omega), eps_((check_frequency(omega), check_radius(radius), permittivity_at(model, omega))),
      n_(index_at(model, omega)), z1_(omega * to_natural_length(radius)), z2_(n_ * z1_),
      lmax_(lmax), t1_(z1_, lmax), t2_(z2_, lmax) {
  if (lmax < 1)
    throw Error(ErrorCode::InvalidArgument, "Mie series need lmax >= 1");
}

ScaledComplex MieContext::bn_scaled(int l) const {
  const ScaledComplex num = eps_ * t2_.j(l) * t1_.jr(l) - t1_.j(l) * t2_.jr(l);
  if (num.is_zero())
    return {};
  const ScaledComplex den = eps_ * t2_.j(l) * t1_.hr(l) - t2_.jr(l) * t1_.h(l);
  return -(num / den);
}

ScaledComplex MieContext::bm_scaled(int l) const {
  const ScaledComplex num = t2_.jr(l) * t1_.j(l) - t1_.jr(l) * t2_.j(l);
  if (num.is_zero())
    return {};
  const ScaledComplex den = t2_.jr(l) * t1_.h(l) - t2_.j(l) * t1_.hr(l);
  return -(num / den);
}

cplx MieContext::bn(int l) const { return bn_scaled(l).value_or_saturate(); }

cplx MieContext::bm(int l) const { return bm_scaled(l).value_or_saturate(); }

ScaledComplex MieContext::cn(int l) const {
  const ScaledComplex num = eps_ * t2_.h(l) * t1_.hr(l) - t1_.h(l) * t2_.hr(l);
  const ScaledComplex den = eps_ * t2_.j(l) * t1_.hr(l) - t2_.jr(l) * t1_.h(l);
  return -(num / den);
}

ScaledComplex MieContext::cm(int l) const {
  const ScaledComplex num = t2_.hr(l) * t1_.h(l) - t1_.hr(l) * t2_.h(l);
  const ScaledComplex den = t2_.jr(l) * t1_.h(l) - t2_.j(l) * t1_.hr(l);
  return -(num / den);
}

cplx MieContext::tm_denominator(int l) const {
  const ScaledComplex den = eps_ * t2_.j(l) * t1_.hr(l) - t2_.jr(l) * t1_.h(l);
  return den.mant * std::exp(den.scale - t2_.j(l).scale - t1_.h(l).scale);
}

cplx MieContext::te_denominator(int l) const {
  const ScaledComplex den = t2_.jr(l) * t1_.h(l) - t2_.j(l) * t1_.hr(l);
  return den.mant * std::exp(den.scale - t2_.j(l).scale - t1_.h(l).scale);
}

MieCoefficientSet MieContext::coefficients(int l) const {
  if (l < 1 || l > lmax_)
    throw Error(ErrorCode::InvalidArgument, "Mie order outside context range");
  MieCoefficientSet c;
  c.l = l;
  try {
    c.bm = bm(l);
    c.bn = bn(l);
  } catch (const Error &e) {
    std::ostringstream os;
    os << e.what() << " (l = " << l << ", z1 = " << z1_ << ", z2 = " << z2_ << ")";
    throw Error(e.code(), os.str());
  }
  c.cm_scaled = cm(l);
  c.cn_scaled = cn(l);
  c.cm = c.cm_scaled.value_or_saturate();
  c.cn = c.cn_scaled.value_or_saturate();
  c.at_frequency = omega_;
  c.size_params = {z1_, z2_};
  return c;
}

MieCoefficientSet mie_coefficients(const MaterialModel &model, double radius, cplx omega, int l) {
  if (l < 1)
    throw Error(ErrorCode::InvalidArgument, "mie_coefficients requires l >= 1");
  return MieContext(model, radius, omega, l).coefficients(l);
}

CharacteristicValue characteristic(const MaterialModel &model, double radius, cplx omega, int l,
                                   Polarization pol) {
  if (l < 1)
    throw Error(ErrorCode::InvalidArgument, "characteristic requires l >= 1");
  const MieContext ctx(model, radius, omega, l);
  const cplx lxi = ctx.outer().log_deriv_h(l);
  const cplx lpsi = ctx.inner().log_deriv_j(l);
  const cplx n = ctx.index();
  const cplx m = pol == Polarization::TE ? lxi - n * lpsi : lxi - lpsi / n;
  return {m, pol, l};
}

double fluctuation_prr(const MaterialModel &model, double radius, double omega, double r) {
  check_radius(radius);
  if (!(omega > 0.0))
    throw Error(ErrorCode::Domain, "fluctuation_prr requires omega > 0");
  if (!(r > 0.0) || std::abs(r - radius) < surface_guard)
    throw Error(ErrorCode::Domain, "fluctuation_prr: field point too close to the surface");

  const double k = omega;
  const double rn = to_natural_length(r);
  const cplx n = index_at(model, omega);
  const double x = std::max({omega * to_natural_length(radius), std::abs(n) * omega * to_natural_length(radius), k * rn});
  const bool outside = r > radius;

  auto build = [&](int L) {
    const MieContext ctx(model, radius, omega, L);
    std::vector<cplx> terms(L);
    if (outside) {
      const cplx xr = k * rn;
      const SphericalBesselTable tr(xr, L);
      for (int l = 1; l <= L; ++l) {
        const ScaledComplex hx = tr.h(l) * (1.0 / xr);
        terms[l - 1] = static_cast<double>(l) * (l + 1.0) * (2.0 * l + 1.0) *
                       (ctx.bn_scaled(l) * hx * hx).value_or_saturate();
      }
    } else {
      const cplx xr = n * k * rn;
      const SphericalBesselTable tr(xr, L);
      for (int l = 1; l <= L; ++l) {
        const ScaledComplex jx = tr.j(l) * (1.0 / xr);
        terms[l - 1] = static_cast<double>(l) * (l + 1.0) * (2.0 * l + 1.0) * (ctx.cn(l) * jx * jx).value_or_saturate();
      }
    }
    return terms;
  };
  const detail::SeriesSum s = detail::adaptive_series(truncation_order(x), build);
  if (!s.converged)
    throw Error(ErrorCode::NoConvergence, "fluctuation series did not converge");
  // Im[(i k_j / 4 pi) S]
  const cplx kj = outside ? cplx(k) : n * k;
  return (cplx(0.0, 1.0) * kj / (4.0 * std::numbers::pi) * s.sum).imag();
}

} // namespace sphereqed
