#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles/bohren_huffman.hpp"
#include "sphereqed/error.hpp"
#include "sphereqed/mie.hpp"
#include "sphereqed/resonance.hpp"
#include "sphereqed/units.hpp"

using namespace sphereqed;

namespace {

const MaterialModel sample = MaterialModel::dielectric(0.5, 1e-4);

} // namespace

TEST_CASE("exterior coefficients match the textbook Mie coefficients") {
  for (double radius : {0.1, 0.5, 2.0}) {
    for (double w : {0.5, 0.94042, 1.02811, 1.05, 1.3}) {
      const int L = truncation_order(w * to_natural_length(radius) * 2.0);
      const double x = w * to_natural_length(radius);
      const cplx n = refractive_index(permittivity(sample, w)).value;
      const oracle::MieAB ab = oracle::bohren_huffman(x, n, L);
      const MieContext ctx(sample, radius, w, L);
      for (int l = 1; l <= L; ++l) {
        const cplx a(ab.a[l].real(), ab.a[l].imag());
        const cplx b(ab.b[l].real(), ab.b[l].imag());
        if (std::abs(a) < 1e-250 || std::abs(b) < 1e-250)
          continue;
        CAPTURE(radius);
        CAPTURE(w);
        CAPTURE(l);
        CHECK(std::abs(ctx.bn(l) + a) <= 1e-9 * std::abs(a));
        CHECK(std::abs(ctx.bm(l) + b) <= 1e-9 * std::abs(b));
      }
    }
  }
}

TEST_CASE("vacuum sphere does not scatter") {
  const MaterialModel vacuum{0.0, 1.0, 1e-4};
  for (double w : {0.3, 0.94, 1.5}) {
    const MieContext ctx(vacuum, 2.0, w, 40);
    for (int l = 1; l <= 40; ++l) {
      CHECK(std::abs(ctx.bn(l)) < 1e-13);
      CHECK(std::abs(ctx.bm(l)) < 1e-13);
    }
    // TE characteristic reduces to H'/H - J'/J, nonzero by the Wronskian
    for (int l : {1, 5, 16})
      CHECK(std::abs(characteristic(vacuum, 2.0, w, l, Polarization::TE).value) > 1e-6);
  }
}

TEST_CASE("coefficients decay beyond the interior size parameter") {
  const double w = 0.94042;
  const MieContext ctx(sample, 2.0, w, 120);
  const int onset = static_cast<int>(std::ceil(std::abs(ctx.z2()))) + 2;
  double prev = std::abs(ctx.bn_scaled(onset).value_or_saturate());
  for (int l = onset + 1; l <= 120; ++l) {
    const double cur = std::exp(ctx.bn_scaled(l).normalized().log_abs());
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(std::abs(ctx.bn(120)) < 1e-30);
}

TEST_CASE("shared denominators and interior coefficients") {
  const MieContext ctx(sample, 2.0, cplx(0.94, 0.0), 30);
  for (int l = 1; l <= 30; ++l) {
    CHECK(std::abs(ctx.tm_denominator(l)) > 0.0);
    CHECK(std::abs(ctx.te_denominator(l)) > 0.0);
    const MieCoefficientSet s = ctx.coefficients(l);
    CHECK(s.l == l);
    CHECK(s.bn == ctx.bn(l));
    CHECK(std::isfinite(std::abs(s.cn)));
  }
  const MieCoefficientSet one = mie_coefficients(sample, 2.0, 0.94, 16);
  CHECK(std::abs(one.bn - ctx.bn(16)) <= 1e-14 * std::abs(ctx.bn(16)));
  CHECK(std::abs(one.size_params.first - 0.94 * to_natural_length(2.0)) < 1e-12);
  CHECK_THROWS_AS(ctx.coefficients(31), Error);
}

TEST_CASE("TM denominator has a sharp minimum at the l = 16 resonance") {
  const int l = 16;
  double best = 1e300, best_w = 0.0;
  for (int i = -400; i <= 400; ++i) {
    const double w = 0.94042 + 1e-6 * i;
    const double d = std::abs(MieContext(sample, 2.0, w, l).tm_denominator(l));
    if (d < best) {
      best = d;
      best_w = w;
    }
  }
  CHECK(std::abs(best_w - 0.94042) < 2e-4);
  const double off = std::abs(MieContext(sample, 2.0, 0.935, l).tm_denominator(l));
  CHECK(off > 20.0 * best);
}

TEST_CASE("characteristic roots are denominator zeros") {
  for (auto [l, kind] : {std::pair{16, ResonanceKind::WG}, std::pair{14, ResonanceKind::WG},
                         std::pair{16, ResonanceKind::SG}, std::pair{30, ResonanceKind::SG}}) {
    const Resonance r = kind == ResonanceKind::WG ? find_wg(sample, 2.0, l, 1, Polarization::TM)
                                                  : find_sg(sample, 2.0, l);
    CHECK(std::abs(characteristic(sample, 2.0, r.omega_c, l, Polarization::TM).value) < 1e-8);
    // Newton on the denominator from the characteristic root must not move
    cplx w = r.omega_c;
    for (int it = 0; it < 8; ++it) {
      const double h = 1e-7 * std::abs(w);
      const cplx d0 = MieContext(sample, 2.0, w, l).tm_denominator(l);
      const cplx dp = MieContext(sample, 2.0, w + h, l).tm_denominator(l);
      const cplx dm = MieContext(sample, 2.0, w - h, l).tm_denominator(l);
      w -= d0 / ((dp - dm) / (2.0 * h));
    }
    CHECK(std::abs(w - r.omega_c) < 1e-10);
  }
}

TEST_CASE("no TE characteristic zeros in the gap") {
  for (int l : {10, 16, 30}) {
    double smallest = 1e300;
    for (int i = 0; i <= 200; ++i) {
      const double w = 1.001 + 0.001 * i * (std::sqrt(1.25) - 1.002) / 0.2;
      smallest = std::min(smallest,
                          std::abs(characteristic(sample, 2.0, w, l, Polarization::TE).value));
    }
    CHECK(smallest > 0.1);
    CHECK(count_roots(sample, 2.0, l, Polarization::TE, {1.01, 1.11, -0.005, 0.005}) == 0);
  }
}

TEST_CASE("lossless coefficients stay bounded near resonances") {
  const MaterialModel lossless = sample.lossless();
  for (int l : {14, 16}) {
    const Resonance r = find_wg(sample, 2.0, l, 1, Polarization::TM);
    for (int i = -50; i <= 50; ++i) {
      const double w = r.omega() + i * 0.2 * r.delta();
      CHECK(std::abs(MieContext(lossless, 2.0, w, l).bn(l)) <= 1.05);
    }
  }
}

TEST_CASE("fluctuation spectrum profiles") {
  const double R = 2.0;
  SUBCASE("far field is much weaker than at the surface") {
    const double near = std::abs(fluctuation_prr(sample, R, 0.94042, R + 0.01));
    const double far = std::abs(fluctuation_prr(sample, R, 0.94042, 20.0));
    CHECK(far * 1e3 <= near);
  }
  SUBCASE("WG profile peaks inside the sphere") {
    double best = -1e300, at = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double r = 0.01 + i * (3.99 / 400);
      if (std::abs(r - R) < 2e-3)
        continue;
      const double v = fluctuation_prr(sample, R, 0.94042, r);
      if (v > best) {
        best = v;
        at = r;
      }
    }
    CHECK(at < R);
    CHECK(at > 0.5 * R);
  }
  SUBCASE("SG profile peaks at the surface on both sides") {
    auto v = [&](double r) { return fluctuation_prr(sample, R, 1.02811, r); };
    const double in = v(R - 0.002), out = v(R + 0.002);
    for (double d : {0.05, 0.2, 0.5}) {
      CHECK(v(R - d) < in);
      CHECK(v(R + d) < out);
    }
  }
  SUBCASE("surface guard") {
    CHECK_THROWS_AS(fluctuation_prr(sample, R, 0.94, R + 0.5 * surface_guard), Error);
    CHECK_THROWS_AS(fluctuation_prr(sample, R, 0.94, R), Error);
    CHECK_THROWS_AS(fluctuation_prr(sample, R, -1.0, 3.0), Error);
  }
  SUBCASE("only TM coefficients enter") {
    // rebuilt from B^N alone
    const double w = 0.9, r = 2.3;
    const double x = w * to_natural_length(r);
    const int L = 80;
    const MieContext ctx(sample, R, w, L);
    const SphericalBesselTable t(x, L);
    cplx s = 0.0;
    for (int l = 1; l <= L; ++l) {
      const cplx hx = t.h(l).value() / x;
      s += double(l) * (l + 1) * (2 * l + 1) * ctx.bn(l) * hx * hx;
    }
    const double ref = (cplx(0.0, 1.0) * w / (4 * std::numbers::pi) * s).imag();
    CHECK(fluctuation_prr(sample, R, w, r) == doctest::Approx(ref).epsilon(1e-10));
  }
}
