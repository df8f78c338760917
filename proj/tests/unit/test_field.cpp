#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "sphereqed/atom.hpp"
#include "sphereqed/error.hpp"
#include "sphereqed/field.hpp"
#include "sphereqed/resonance.hpp"
#include "sphereqed/units.hpp"

using namespace sphereqed;
using namespace std::complex_literals;

namespace {

const MaterialModel sample = MaterialModel::dielectric(0.5, 1e-4);
constexpr double R = 2.0;
constexpr double pi = std::numbers::pi;

// Free-space dipole field in the same normalization, (e_r, e_theta, e_phi)
// at (r, theta, phi) for a dipole at height z_a along e_z (radial) or e_x.
std::array<cplx, 3> free_dipole(double k, double z_a, bool radial, double r, double th, double ph) {
  const double p[3] = {r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph),
                       r * std::cos(th) - z_a};
  const double rho = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  const double n[3] = {p[0] / rho, p[1] / rho, p[2] / rho};
  const double d[3] = {radial ? 0.0 : 1.0, 0.0, radial ? 1.0 : 0.0};
  const double nd = n[0] * d[0] + n[1] * d[1] + n[2] * d[2];
  const double kr = k * rho;
  const cplx near = (1.0 / (kr * kr * kr) - 1i / (kr * kr));
  cplx e[3];
  for (int i = 0; i < 3; ++i)
    e[i] = std::exp(1i * kr) * ((d[i] - n[i] * nd) / kr + (3.0 * n[i] * nd - d[i]) * near);
  const double er[3] = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
  const double et[3] = {std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th)};
  const double ep[3] = {-std::sin(ph), std::cos(ph), 0.0};
  auto dot = [&](const double *u) { return e[0] * u[0] + e[1] * u[1] + e[2] * u[2]; };
  return {dot(er), dot(et), dot(ep)};
}

double norm3(const FieldVector &f) { return std::norm(f[0]) + std::norm(f[1]) + std::norm(f[2]); }

std::vector<double> theta_row(const EmissionPattern &p, double phi) {
  std::vector<double> v;
  for (std::size_t i = 0; i < p.grid.size(); ++i)
    if (p.grid[i].phi == phi)
      v.push_back(p.values[i]);
  return v;
}

AtomConfig fig10_atom(double omega_a) {
  return AtomConfig::near(R, 0.02, omega_a, Orientation::Radial, 1e-7);
}

double buildup_delay(const TimeTrace &tr) {
  const double peak = *std::max_element(tr.intensity.begin(), tr.intensity.end());
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    if (tr.intensity[i] >= 0.5 * peak)
      return tr.times[i];
  return tr.times.back();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = a + (b - a) * i / (n - 1);
  return v;
}

} // namespace

TEST_CASE("field without the sphere is the free dipole field") {
  FieldOptions none;
  none.include_sphere = false;
  for (Orientation o : {Orientation::Radial, Orientation::Tangential}) {
    const AtomConfig a = AtomConfig::near(R, 0.02, 0.94042, o);
    const double k = a.omega_a;
    for (double r : {3.0, 20.0}) {
      for (double th : {0.2, 1.0, 1.7, 2.9}) {
        for (double ph : {0.0, 0.8}) {
          const FieldVector f = emission_field(sample, R, a, k, r, th, ph, none);
          const auto ref = free_dipole(k, to_natural_length(a.r_a), o == Orientation::Radial,
                                       to_natural_length(r), th, ph);
          double num = 0.0, den = 0.0;
          // equal up to one global phase
          const cplx ph0 = std::abs(ref[1]) > std::abs(ref[0]) ? f[1] / ref[1] : f[0] / ref[0];
          for (int i = 0; i < 3; ++i) {
            num += std::norm(f[i] - ph0 * ref[i]);
            den += std::norm(ref[i]);
          }
          CHECK(std::abs(std::abs(ph0) - 1.0) < 1e-9);
          CHECK(std::sqrt(num / den) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("free-space far-field shape is the sin^2 dipole lobe") {
  FieldOptions none;
  none.include_sphere = false;
  const AtomConfig a = AtomConfig::near(R, 0.02, 0.94042);
  const double za = to_natural_length(a.r_a), rn = to_natural_length(20.0);
  std::vector<double> shape;
  for (double th : linspace(0.3, 2.8, 26)) {
    const double f = norm3(emission_field(sample, R, a, a.omega_a, 20.0, th, 0.0, none));
    // angle and distance as seen from the atom
    const double x = rn * std::sin(th), z = rn * std::cos(th) - za;
    const double rho2 = x * x + z * z;
    const double s2 = x * x / rho2;
    shape.push_back(f * a.omega_a * a.omega_a * rho2 / s2);
  }
  for (double v : shape)
    CHECK(v == doctest::Approx(shape.front()).epsilon(0.01));
}

TEST_CASE("radial pattern at TM_{16,1} has 16 lobes") {
  const AtomConfig a = AtomConfig::near(R, 0.02, 0.94042);
  const EmissionPattern p = far_field_pattern(sample, R, a, 20.0, default_pattern_grid(Orientation::Radial));
  REQUIRE(p.values.size() == 721);
  for (double v : p.values)
    CHECK(v >= 0.0);
  const auto lobes = find_lobes(p.values);
  CHECK(lobes.size() == 16);

  // lobe envelope: field amplitude grows like (sin theta)^{-1/2}
  std::vector<double> lx, ly;
  for (std::size_t i : lobes) {
    const double th = p.grid[i].theta;
    if (th < 0.35 || th > pi - 0.35)
      continue; // the asymptotic form holds away from the poles
    lx.push_back(std::log(std::sin(th)));
    ly.push_back(0.5 * std::log(p.values[i]));
  }
  REQUIRE(lx.size() >= 6);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= lx.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  MESSAGE("lobe envelope exponent " << slope);
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("radial pattern is axially symmetric") {
  const AtomConfig a = AtomConfig::near(R, 0.02, 0.94042);
  std::vector<AngularPoint> grid;
  for (double th : linspace(0.0, pi, 37))
    for (double ph : {0.0, 1.0, 2.5, 4.0})
      grid.push_back({th, ph});
  const EmissionPattern p = far_field_pattern(sample, R, a, 20.0, grid);
  for (std::size_t i = 0; i < grid.size(); i += 4)
    for (int j = 1; j < 4; ++j)
      CHECK(p.values[i + j] == doctest::Approx(p.values[i]).epsilon(1e-12));
}

TEST_CASE("tangential pattern has its dominant lobes at the poles") {
  const AtomConfig a = AtomConfig::near(R, 0.02, 0.94042, Orientation::Tangential);
  const EmissionPattern p =
      far_field_pattern(sample, R, a, 20.0, default_pattern_grid(Orientation::Tangential));
  CHECK(p.values.size() == 2 * 721);
  const std::vector<double> row = theta_row(p, 0.0);
  REQUIRE(row.size() == 721);
  // lobe maxima, the endpoints counting when they exceed their neighbour
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const bool left = i == 0 || row[i] > row[i - 1];
    const bool right = i + 1 == row.size() || row[i] >= row[i + 1];
    if (left && right)
      order.push_back(i);
  }
  REQUIRE(order.size() >= 2);
  std::partial_sort(order.begin(), order.begin() + 2, order.end(),
                    [&](std::size_t x, std::size_t y) { return row[x] > row[y]; });
  const std::size_t lo = std::min(order[0], order[1]), hi = std::max(order[0], order[1]);
  CHECK(lo == 0);
  CHECK(hi == 720);
  for (double v : p.values)
    CHECK(v >= 0.0);
}

TEST_CASE("pattern argument checks") {
  const AtomConfig a = AtomConfig::near(R, 0.02, 0.94042);
  CHECK_THROWS_AS(far_field_pattern(sample, R, a, 2.01, default_pattern_grid(Orientation::Radial)), Error);
  CHECK_THROWS_AS(far_field_pattern(sample, R, a, 20.0, {}), Error);
  CHECK(find_lobes({1.0, 2.0, 1.0, 3.0, 1.0}).size() == 2);
  CHECK(find_lobes({1.0, 2.0, 1.0, 1000.0, 1.0}, 1e-2).size() == 1);
  CHECK(find_lobes({3.0, 2.0, 1.0}).empty());
}

TEST_CASE("radiated fraction") {
  SUBCASE("lossless medium radiates everything") {
    const MaterialModel clean = sample.lossless();
    for (double w : {0.5, 0.9, 0.94042, 0.97})
      for (double dr : {0.02, 0.1}) {
        const double v = radiated_fraction(clean, R, AtomConfig::near(R, dr, w)).value;
        CHECK(std::abs(v - 1.0) < 1e-6);
      }
  }
  SUBCASE("bounded by one and dipping at WG resonances") {
    const Resonance res = find_wg(sample, R, 16, 1, Polarization::TM);
    std::vector<double> ws = linspace(res.omega() - 5 * res.delta(), res.omega() + 5 * res.delta(), 41);
    double best = 1e300, at = 0.0;
    for (double w : ws) {
      const EnergyFraction f = radiated_fraction(sample, R, AtomConfig::near(R, 0.02, w));
      CHECK(f.value >= 0.0);
      CHECK(f.value <= 1.0 + 1e-6);
      CHECK(f.series_terms > 0);
      if (f.value < best) {
        best = f.value;
        at = w;
      }
    }
    CHECK(std::abs(at - res.omega()) < 2 * res.delta());
    CHECK(best < radiated_fraction(sample, R, AtomConfig::near(R, 0.02, 0.93)).value);
  }
  SUBCASE("tangential dipole rejected") {
    CHECK_THROWS_AS(radiated_fraction(sample, R, AtomConfig::near(R, 0.02, 0.9, Orientation::Tangential)),
                    Error);
  }
}

TEST_CASE("Markov intensity") {
  const AtomConfig a = fig10_atom(0.94042);
  const double rate = decay_rate(sample, R, a).rate_ratio * a.a0_over_omega;
  const EmissionPattern p = far_field_pattern(sample, R, a, 20.0, {{3.0, 0.0}});
  CHECK(intensity_markov(sample, R, a, 20.0, 3.0, 0.0, 0.0) == p.values[0]);
  const double t1 = 1e5, t2 = 4e5;
  const double i1 = intensity_markov(sample, R, a, 20.0, 3.0, 0.0, t1);
  const double i2 = intensity_markov(sample, R, a, 20.0, 3.0, 0.0, t2);
  CHECK(-std::log(i2 / i1) / (t2 - t1) == doctest::Approx(rate).epsilon(1e-10));
}

TEST_CASE("exact intensity approaches the Markov law") {
  for (double w : {0.94042, 0.91779}) {
    const AtomConfig a = fig10_atom(w);
    const double rate = decay_rate(sample, R, a).rate_ratio * a.a0_over_omega;
    const std::vector<double> ts = linspace(5.0 / rate, 12.0 / rate, 36);
    const TimeTrace tr = intensity_exact(sample, R, a, 20.0, 3.0, 0.0, ts);
    CHECK(tr.method == TraceMethod::Exact);
    CHECK(tr.frequency_samples > 0);
    double dev = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double m = intensity_markov(sample, R, a, 20.0, 3.0, 0.0, ts[i]);
      dev += std::abs(tr.intensity[i] - m) / m;
      CHECK(tr.intensity[i] >= 0.0);
    }
    dev /= ts.size();
    MESSAGE("omega_a " << w << ": mean relative deviation " << dev);
    CHECK(dev < 0.05);
    const double slope = -std::log(tr.intensity.back() / tr.intensity.front()) / (ts.back() - ts.front());
    CHECK(slope == doctest::Approx(rate).epsilon(0.02));
  }
}

TEST_CASE("buildup is delayed more for the higher-Q resonance") {
  const AtomConfig a16 = fig10_atom(0.94042);
  const AtomConfig a14 = fig10_atom(0.91779);
  const std::vector<double> ts = linspace(0.0, 1e6, 401);
  const TimeTrace t16 = intensity_exact(sample, R, a16, 20.0, 3.0, 0.0, ts);
  const TimeTrace t14 = intensity_exact(sample, R, a14, 20.0, 3.0, 0.0, ts);
  const double peak16 = *std::max_element(t16.intensity.begin(), t16.intensity.end());
  CHECK(t16.intensity[0] < 1e-12 * peak16);
  CHECK(t14.intensity[0] < 1e-12 * peak16);
  CHECK(t16.intensity[1] < 0.5 * peak16);
  const double d16 = buildup_delay(t16), d14 = buildup_delay(t14);
  MESSAGE("buildup delays " << d16 << " (TM16) " << d14 << " (TM14)");
  CHECK(d16 > d14);

  // kink-like structure: the slope of the high-Q trace is not monotone
  // over the rise, beyond the single inflection of a smooth buildup
  std::size_t peak_at = std::max_element(t16.intensity.begin(), t16.intensity.end()) - t16.intensity.begin();
  int turns = 0;
  double prev = 0.0;
  for (std::size_t i = 2; i <= std::min(peak_at + 20, ts.size() - 1); ++i) {
    const double c = t16.intensity[i] - 2 * t16.intensity[i - 1] + t16.intensity[i - 2];
    if (i > 2 && (c > 0) != (prev > 0))
      ++turns;
    prev = c;
  }
  MESSAGE("curvature sign changes during the TM16 rise: " << turns);
  CHECK(turns >= 2);
}

TEST_CASE("exact intensity is independent of the thread count") {
  const AtomConfig a = fig10_atom(0.94042);
  const std::vector<double> ts = linspace(0.0, 1e6, 21);
  ExactOptions one, four;
  four.threads = 4;
  const TimeTrace x = intensity_exact(sample, R, a, 20.0, 3.0, 0.0, ts, one);
  const TimeTrace y = intensity_exact(sample, R, a, 20.0, 3.0, 0.0, ts, four);
  CHECK(x.intensity == y.intensity);
  CHECK(x.frequency_samples == y.frequency_samples);
}

TEST_CASE("exact intensity argument checks") {
  AtomConfig a = fig10_atom(0.94042);
  CHECK_THROWS_AS(intensity_exact(sample, R, a, 20.0, 3.0, 0.0, {}), Error);
  CHECK_THROWS_AS(intensity_exact(sample, R, a, 20.0, 3.0, 0.0, {-1.0}), Error);
  a.a0_over_omega = 0.0;
  CHECK_THROWS_AS(intensity_exact(sample, R, a, 20.0, 3.0, 0.0, {1.0}), Error);
}

TEST_CASE("linewidth estimate") {
  const Resonance res = find_wg(sample, R, 16, 1, Polarization::TM);
  const double hw = estimate_linewidth(sample, R, AtomConfig::near(R, 0.02, res.omega()));
  // the rate peak is the resonance Lorentzian, so its HWHM is about delta
  CHECK(hw == doctest::Approx(res.delta()).epsilon(0.3));
}
