// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spintex/dynamics.hpp"
#include "spintex/errors.hpp"
#include "support.hpp"

using namespace spintex;

TEST_SUITE("dynamics") {
  TEST_CASE("closed form at pulse areas 0, pi/2 and pi") {
    const IonCrystal& c = test::crystal160();
    const DriveParams p = test::paper_drive(c);
    const BlochField f0 = evolve_closed_form(c, p, 0.0);
    for (const auto& v : f0.vectors()) CHECK((v - Vec3::UnitX()).norm() < 1e-15);

    const double t_half = (kPi / 2.0) / p.omega_R;
    const BlochField fh = evolve_closed_form(c, p, t_half);
    const BlochField fp = evolve_closed_form(c, p, 2.0 * t_half);
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double rn = c.normalized_radius(j);
      const double chi = c[j].phi_rad + p.psi;
      const double a = rn * kPi / 2.0;
      const Vec3 expect(std::cos(a), std::sin(a) * std::cos(chi), -std::sin(a) * std::sin(chi));
      CHECK((fh[j] - expect).norm() < 1e-12);
      if (rn == 1.0) CHECK((fp[j] + Vec3::UnitX()).norm() < 1e-12);
    }
  }

  TEST_CASE("centre ion stays on +X") {
    const IonCrystal& c = test::crystal160();
    REQUIRE(c[0].r_um == 0.0);
    const DriveParams p = test::paper_drive(c);
    DriveParams flat = p;
    flat.eta_x = 0.0;
    flat.dk_x = 0.0;
    flat.omega_R = 0.0;
    for (double t : {1e-5, 3.2e-4}) {
      CHECK(evolve_closed_form(c, p, t)[0] == Vec3::UnitX());
      // The full drive still rotates it through the off-resonant terms, the
      // same way it rotates every ion when there is no gradient.
      const std::size_t n = default_substeps(p, t);
      CHECK((evolve_full_drive(c, p, t, n)[0] - evolve_full_drive(c, flat, t, n)[0]).norm() < 1e-12);
    }
  }

  TEST_CASE("ODE agrees with the closed form") {
    const IonCrystal& c = test::crystal160();
    const DriveParams p = test::paper_drive(c);
    const double t = kPi / p.omega_R;
    const BlochField ode =
        evolve_bloch_ode(c, p, BlochField::uniform(c.size(), Vec3::UnitX()), t);
    const BlochField cf = evolve_closed_form(c, p, t);
    double worst = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) worst = std::max(worst, (ode[j] - cf[j]).norm());
    CHECK(worst < 1e-8);
  }

  TEST_CASE("ODE preserves norms of arbitrary starts") {
    const IonCrystal c = generate_crystal(40.0, 150.0);
    const DriveParams p = test::paper_drive(c);
    std::vector<Vec3> init;
    for (std::size_t j = 0; j < c.size(); ++j)
      init.push_back(Vec3(std::cos(0.3 * j), std::sin(0.3 * j), 0.2).normalized());
    const BlochField out = evolve_bloch_ode(c, p, BlochField(init), 2e-4);
    for (const auto& v : out.vectors()) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("closed form is equivariant under crystal rotation") {
    const IonCrystal& c = test::crystal160();
    DriveParams p = test::paper_drive(c);
    const double t = 2.1e-4, delta = 0.7;
    const BlochField a = evolve_closed_form(c, p, t);
    p.psi -= delta;
    const BlochField b = evolve_closed_form(c.rotated(delta), p, t);
    for (std::size_t j = 0; j < c.size(); ++j) CHECK((a[j] - b[j]).norm() < 1e-12);
  }

  TEST_CASE("full drive without a gradient leaves spins near +X") {
    const IonCrystal c = generate_crystal(40.0, 150.0);
    DriveParams p = test::paper_drive(c);
    p.eta_x = 0.0;
    p.dk_x = 0.0;
    p.omega_R = 0.0;
    // Only off-resonant terms remain; their excursion is bounded by the
    // drive amplitude over the detuning.
    const double bound = 2.0 * p.delta_ac / p.omega_rot +
                         2.0 * p.delta_ac / (2.0 * p.omega_mw + p.omega_rot);
    for (double t : {5e-5, 3.2e-4}) {
      const BlochField f = evolve_full_drive(c, p, t, default_substeps(p, t));
      for (const auto& v : f.vectors()) {
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::acos(std::clamp(v.x(), -1.0, 1.0)) < bound);
      }
    }
  }

  TEST_CASE("full drive tracks the closed form at the operating point") {
    const IonCrystal c = generate_crystal(40.0, 150.0);
    const DriveParams p = test::paper_drive(c);
    const double t = kPi / p.omega_R;
    const BlochField full = evolve_full_drive(c, p, t, default_substeps(p, t));
    const double inf = mean_infidelity(full, evolve_closed_form(c, p, t));
    CHECK(inf < 0.05);
    CHECK(inf > 0.0);
  }

  TEST_CASE("too few substeps are reported") {
    const IonCrystal c = generate_crystal(60.0, 150.0);
    const DriveParams p = test::paper_drive(c);
    CHECK_THROWS_AS(evolve_full_drive(c, p, kPi / p.omega_R, 4), NumericalFailure);
    CHECK_THROWS_AS(evolve_full_drive(c, p, 1e-4, 0), InvalidParameter);
  }

  TEST_CASE("mean infidelity") {
    const BlochField a = BlochField::uniform(3, Vec3::UnitX());
    CHECK(mean_infidelity(a, a) == 0.0);
    CHECK(mean_infidelity(a, BlochField::uniform(3, -Vec3::UnitX())) == doctest::Approx(1.0));
    CHECK(mean_infidelity(a, BlochField::uniform(3, Vec3::UnitY())) == doctest::Approx(0.5));
    CHECK_THROWS_AS(mean_infidelity(a, BlochField::uniform(2, Vec3::UnitX())), InvalidParameter);
  }

  TEST_CASE("RWA check") {
    const RwaReport r = check_rwa(DriveParams::experiment(26e3));
    CHECK(r.pass);
    CHECK(r.ratio == doctest::Approx(1.56 / 52.0).epsilon(1e-9));
    const RwaReport r25 = check_rwa(DriveParams::experiment(25e3));
    CHECK(r25.ratio == doctest::Approx(1.56 / 50.0).epsilon(1e-9));
    DriveParams slow = DriveParams::experiment(1e3);
    CHECK_FALSE(check_rwa(slow).pass);
  }

  TEST_CASE("parameter consistency") {
    DriveParams p = DriveParams::experiment(25e3);
    CHECK_NOTHROW(p.validate());
    CHECK(p.is_resonant());
    const DriveParams half = p.with_eta_scaled(0.5);
    CHECK(half.delta_ac == p.delta_ac);
    CHECK(half.omega_R == doctest::Approx(p.omega_R / 2));
    CHECK_NOTHROW(half.validate());
    p.omega_R *= 1.01;
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
    CHECK_THROWS_AS(DriveParams::resonant(1.0, 0.0, 150, 1, 1), InvalidParameter);
    CHECK_THROWS_AS(evolve_closed_form(test::crystal160(), half, -1.0), InvalidParameter);
  }
}
