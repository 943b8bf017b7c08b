// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "spintex/diagnostics.hpp"
#include "spintex/dynamics.hpp"
#include "spintex/errors.hpp"
#include "spintex/protocols.hpp"
#include "support.hpp"

using namespace spintex;

namespace {

// Inverse stereographic projection of the plane scaled by lambda.
Vec3 hedgehog(double x, double y, double lambda) {
  const double a = x / lambda, b = y / lambda, s = 1.0 + a * a + b * b;
  return {2.0 * a / s, 2.0 * b / s, (2.0 - s) / s};
}

// (1/4pi) \int u . (d_x u x d_y u) over the disk, central differences on a
// fine polar grid.
double dense_grid_q(double radius, double lambda) {
  const int nr = 4000, nphi = 64;
  const double dr = radius / nr, dphi = kTwoPi / nphi, h = 1e-4 * lambda;
  double sum = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) * dr;
    for (int k = 0; k < nphi; ++k) {
      const double x = r * std::cos((k + 0.5) * dphi), y = r * std::sin((k + 0.5) * dphi);
      const Vec3 dx = (hedgehog(x + h, y, lambda) - hedgehog(x - h, y, lambda)) / (2 * h);
      const Vec3 dy = (hedgehog(x, y + h, lambda) - hedgehog(x, y - h, lambda)) / (2 * h);
      sum += hedgehog(x, y, lambda).dot(dx.cross(dy)) * r * dr * dphi;
    }
  }
  return sum / (4.0 * kPi);
}

BlochField hedgehog_field(const IonCrystal& c, double lambda) {
  std::vector<Vec3> v;
  for (const auto& p : c.positions()) v.push_back(hedgehog(p.x_um(), p.y_um(), lambda));
  return BlochField(v);
}

BlochField skyrmion(const IonCrystal& c) {
  return target_texture(c, TextureSpec::make(TextureKind::neel_skyrmion), kPi / 2.0);
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("solid angle") {
    const Vec3 x = Vec3::UnitX(), y = Vec3::UnitY(), z = Vec3::UnitZ();
    CHECK(solid_angle(x, y, z) == doctest::Approx(kPi / 2.0));
    CHECK(solid_angle(x, z, y) == doctest::Approx(-kPi / 2.0));
    CHECK(solid_angle(x, x, y) == 0.0);
    // Triangle close to a great circle, solid angle near 2 pi.
    const double e = 1e-3;
    const Vec3 a(1, 0, -e), b(-0.5, std::sqrt(3.0) / 2, -e), c(-0.5, -std::sqrt(3.0) / 2, -e);
    CHECK(std::abs(solid_angle(a.normalized(), b.normalized(), c.normalized())) > 6.2);
  }

  TEST_CASE("continuum winding") {
    CHECK(winding_continuum(kPi) == doctest::Approx(-1.0));
    CHECK(winding_continuum(kPi / 2.0) == doctest::Approx(-0.5));
    CHECK(winding_continuum(kTwoPi) == doctest::Approx(0.0));
    CHECK_THROWS_AS(winding_continuum(-0.1), InvalidParameter);
  }

  TEST_CASE("uniform field has Q = 0 exactly") {
    const IonCrystal& c = test::crystal160();
    for (const Vec3& v : std::vector<Vec3>{Vec3::UnitX(), Vec3::UnitZ(), Vec3(0.6, 0, 0.8)})
      CHECK(winding_number(c, BlochField::uniform(c.size(), v)) == 0.0);
  }

  TEST_CASE("hedgehog matches dense-grid integration") {
    const IonCrystal& c = test::crystal160();
    const double lambda = c.radius() / 10.0;
    const double oracle = dense_grid_q(c.radius(), lambda);
    CHECK(oracle == doctest::Approx(100.0 / 101.0).epsilon(1e-4));
    const double q = winding_number(c, hedgehog_field(c, lambda));
    CHECK(std::abs(q - oracle) < 0.02);
    CHECK(std::abs(q - 1.0) < 0.02);
  }

  TEST_CASE("Euler count and site bookkeeping") {
    const IonCrystal& c = test::crystal160();
    const WindingResult r = winding_details(c, skyrmion(c));
    CHECK(r.site_count == c.size());
    CHECK(r.triangle_count == 2 * c.size() - 2 - r.hull_count);
  }

  TEST_CASE("skyrmion against the continuum") {
    const IonCrystal& c = test::crystal160();
    CHECK(std::abs(winding_number(c, skyrmion(c)) - winding_continuum(kPi)) < 0.03);
  }

  TEST_CASE("tie-break independence") {
    const IonCrystal& c = test::crystal160();
    const BlochField f = skyrmion(c);
    WindingOptions a, b;
    b.salt = 12345;
    b.perturbation_fraction = 3e-6;
    CHECK(std::abs(winding_details(c, f, a).Q - winding_details(c, f, b).Q) <= 1e-6);
  }

  TEST_CASE("invariant under global spin rotations and crystal rotation") {
    const IonCrystal& c = test::crystal160();
    const BlochField f = skyrmion(c);
    const double q = winding_number(c, f);
    for (const PulseOp& op :
         std::vector<PulseOp>{PulseOp::x(0.4), PulseOp::y(kPi), PulseOp::about({1, 2, 3}, 2.2)})
      CHECK(winding_number(c, rotate_global(f, op)) == doctest::Approx(q).epsilon(1e-12));
    CHECK(winding_number(c, to_rotated_basis(f)) == doctest::Approx(q).epsilon(1e-12));
  }

  TEST_CASE("pi about y flips the oriented winding number") {
    const IonCrystal& c = test::crystal160();
    const BlochField f = skyrmion(c);
    const double q = oriented_winding_number(c, f);
    CHECK(q < -0.97);
    CHECK(oriented_winding_number(c, rotate_global(f, PulseOp::y(kPi))) ==
          doctest::Approx(-q).epsilon(1e-12));
  }

  TEST_CASE("degenerate spins") {
    const IonCrystal& c = test::crystal160();
    std::vector<Vec3> v(c.size(), Vec3::UnitZ());
    v[5] = Vec3::Zero();
    CHECK_THROWS_AS(winding_number(c, BlochField(v)), DegenerateSpin);
    WindingOptions o;
    o.exclude_short = true;
    const WindingResult r = winding_details(c, BlochField(v), o);
    CHECK(r.excluded == 1);
    CHECK(r.Q == 0.0);
  }

  TEST_CASE("order parameter of the ideal skyrmion") {
    const IonCrystal& c = test::crystal160();
    const DriveParams p = test::paper_drive(c);
    const BlochField f = evolve_closed_form(c, p, kPi / p.omega_R);
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double rn = c.normalized_radius(j);
      s += rn * std::sin(kPi * rn);
    }
    s /= static_cast<double>(c.size());
    const std::complex<double> psi = order_parameter(c, f);
    const std::complex<double> expect = -std::complex<double>(0, 1) * std::polar(1.0, -p.psi) * s;
    CHECK(std::abs(psi - expect) < 1e-12);
    CHECK(std::abs(order_parameter(c, to_rotated_basis(f)) - psi) < 1e-12);
    CHECK(std::abs(order_parameter(c, BlochField::uniform(c.size(), Vec3::UnitZ()))) < 1e-9);
  }

  TEST_CASE("fidelity identities") {
    const IonCrystal& c = test::crystal160();
    const BlochField f = skyrmion(c);
    CHECK(mean_fidelity(f, f).mean == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean_fidelity(f, rotate_global(f, PulseOp::about({1, 1, 1}, 0.0))).mean ==
          doctest::Approx(1.0));
    std::vector<Vec3> neg;
    for (const auto& v : f.vectors()) neg.push_back(-v);
    CHECK(mean_fidelity(f, BlochField(neg)).mean == doctest::Approx(0.0).epsilon(1e-14));
    const FidelityResult z = mean_fidelity(BlochField::uniform(c.size(), Vec3::Zero()), f);
    CHECK(z.mean == doctest::Approx(0.5));
    CHECK(z.per_site.size() == c.size());
    CHECK_THROWS_AS(mean_fidelity(f, BlochField::uniform(3, Vec3::UnitZ())), InvalidParameter);
  }

  TEST_CASE("Rabi-rate fit from a winding series") {
    const double omega = kTwoPi * 1.56e3;
    std::vector<std::pair<double, double>> series;
    for (int i = 0; i < 32; ++i) {
      const double t = i * (kTwoPi / omega) / 31.0;
      series.emplace_back(t, winding_continuum(omega * t));
    }
    const RateFit fit = fit_omega_r(series);
    CHECK(fit.omega_R == doctest::Approx(omega).epsilon(1e-6));
    std::vector<std::pair<double, double>> flat{{0, 0}, {1e-4, 0}, {2e-4, 0}, {3e-4, 0}};
    CHECK_THROWS_AS(fit_omega_r(flat), FitFailure);
    CHECK_THROWS_AS(fit_omega_r(std::span(series).first(3)), FitFailure);
  }

  TEST_CASE("Rabi-rate fit from field trajectories") {
    const IonCrystal& c = test::crystal160();
    const DriveParams p = test::paper_drive(c);
    std::vector<TimedField> series;
    for (int i = 0; i <= 10; ++i) {
      const double t = i * 6e-5;
      series.push_back({t, evolve_closed_form(c, p, t)});
    }
    CHECK(fit_omega_r(c, series, p.psi).omega_R == doctest::Approx(p.omega_R).epsilon(1e-6));
  }

  TEST_CASE("edge width of an error-function profile") {
    const double sigma = 11.0, r0 = 75.0;
    std::vector<std::pair<double, double>> profile;
    for (double r = 0.0; r <= 150.0; r += 2.5)
      profile.emplace_back(r, 0.05 + 0.9 * 0.5 * (1.0 + std::erf((r - r0) / (std::sqrt(2.0) * sigma))));
    const EdgeFit fit = fit_edge_width(profile);
    CHECK(fit.width_10_90 == doctest::Approx(28.2).epsilon(0.02));
    CHECK(fit.sigma == doctest::Approx(sigma).epsilon(1e-6));
    CHECK(fit.r0 == doctest::Approx(r0).epsilon(1e-6));
  }
}
