#include "sphereqed/material.hpp"

#include <cmath>
#include <sstream>

#include "sphereqed/error.hpp"

namespace sphereqed {

void validate(const MaterialModel &model, bool allow_lossless) {
  auto bad = [](const std::string &msg) {
    throw Error(ErrorCode::InvalidArgument, "material: " + msg);
  };
  if (!std::isfinite(model.omega_p) || model.omega_p < 0.0)
    bad("omega_p must be finite and >= 0");
  if (!std::isfinite(model.omega_t) || model.omega_t < 0.0)
    bad("omega_t must be finite and >= 0");
  if (!std::isfinite(model.gamma) || model.gamma < 0.0)
    bad("gamma must be finite and >= 0");
  if (model.gamma == 0.0 && !allow_lossless)
    bad("gamma must be > 0");
}

std::string_view to_string(Regime regime) {
  switch (regime) {
  case Regime::BelowGap:
    return "below-gap";
  case Regime::InGap:
    return "in-gap";
  case Regime::AboveGap:
    return "above-gap";
  }
  return "unknown";
}

std::complex<double> permittivity_at(const MaterialModel &model,
                                     std::complex<double> omega) {
  using namespace std::complex_literals;
  // Factored so that w_T^2 - w^2 keeps its relative accuracy near w_T.
  const std::complex<double> den =
      (model.omega_t - omega) * (model.omega_t + omega) - 1i * omega * model.gamma;
  if (den == 0.0) {
    std::ostringstream os;
    os << "permittivity pole at omega = " << omega;
    throw Error(ErrorCode::Domain, os.str());
  }
  return 1.0 + model.omega_p * model.omega_p / den;
}

Permittivity permittivity(const MaterialModel &model, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw Error(ErrorCode::Domain, "permittivity: omega must be > 0");
  return {permittivity_at(model, omega), omega};
}

RefractiveIndex refractive_index(std::complex<double> eps) {
  const double er = eps.real();
  const double ei = eps.imag();
  const double mod = std::hypot(er, ei);
  double nr = 0.0;
  double ni = 0.0;
  if (er >= 0.0) {
    nr = std::sqrt(0.5 * (mod + er));
    ni = nr > 0.0 ? 0.5 * ei / nr : 0.0;
  } else {
    ni = std::sqrt(0.5 * (mod - er));
    nr = ni > 0.0 ? 0.5 * ei / ni : 0.0;
  }
  // Only eps_I < 0 (never produced by a passive medium at real w) can make
  // one of these negative; keep n_R >= 0 and let n_I carry the sign then.
  if (nr < 0.0) {
    nr = -nr;
    ni = -ni;
  }
  return {{nr, ni}};
}

RefractiveIndex refractive_index(const Permittivity &eps) {
  return refractive_index(eps.value);
}

BandGap band_gap(const MaterialModel &model) {
  const double t2 = model.omega_t * model.omega_t;
  const double p2 = model.omega_p * model.omega_p;
  return {model.omega_t, std::sqrt(t2 + p2), std::sqrt(t2 + 0.5 * p2)};
}

Regime classify_regime(const MaterialModel &model, double omega) {
  const BandGap gap = band_gap(model);
  if (omega <= gap.lower && !model.is_metallic())
    return Regime::BelowGap;
  if (omega <= gap.upper)
    return Regime::InGap;
  return Regime::AboveGap;
}

} // namespace sphereqed
