// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "spintex/diagnostics.hpp"
#include "spintex/errors.hpp"
#include "spintex/protocols.hpp"
#include "support.hpp"

using namespace spintex;

namespace {

BlochField prepare(TextureKind kind, double helicity = kPi / 2.0) {
  const IonCrystal& c = test::crystal160();
  return prepare_texture(c, test::paper_drive(c), TextureSpec::make(kind, helicity));
}

double q_of(TextureKind kind) { return oriented_winding_number(test::crystal160(), prepare(kind)); }

}  // namespace

TEST_SUITE("protocols") {
  TEST_CASE("default drive areas") {
    CHECK(TextureSpec::make(TextureKind::neel_skyrmion).drive_angle == kPi);
    CHECK(TextureSpec::make(TextureKind::meron).drive_angle == kPi / 2.0);
    CHECK(TextureSpec::make(TextureKind::skyrmionium).drive_angle == 2.0 * kPi);
    CHECK(TextureSpec::make(TextureKind::domain_wall).drive_angle == kPi / 10.0);
    CHECK(texture_kind_from_string("bimeron") == TextureKind::bimeron);
    CHECK(to_string(TextureKind::anti_skyrmion) == "anti_skyrmion");
    CHECK_THROWS_AS(texture_kind_from_string("vortex"), InvalidParameter);
  }

  TEST_CASE("winding numbers of the texture family") {
    CHECK(std::abs(q_of(TextureKind::neel_skyrmion) + 1.0) < 0.03);
    CHECK(std::abs(q_of(TextureKind::anti_skyrmion) - 1.0) < 0.03);
    CHECK(std::abs(q_of(TextureKind::meron) + 0.5) < 0.03);
    CHECK(std::abs(q_of(TextureKind::skyrmionium)) < 0.03);
    CHECK(q_of(TextureKind::anti_skyrmion) == doctest::Approx(-q_of(TextureKind::neel_skyrmion)).epsilon(1e-9));
  }

  TEST_CASE("prepared fields match their targets") {
    const IonCrystal& c = test::crystal160();
    const DriveParams p = test::paper_drive(c);
    for (auto kind : {TextureKind::neel_skyrmion, TextureKind::bloch_skyrmion,
                      TextureKind::anti_skyrmion, TextureKind::bimeron, TextureKind::meron,
                      TextureKind::skyrmionium, TextureKind::domain_wall}) {
      const TextureSpec s = TextureSpec::make(kind);
      CHECK(mean_fidelity(prepare_texture(c, p, s), target_texture(c, s, p.psi)).mean ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("centre ion sits on +X without post pulses") {
    const IonCrystal& c = test::crystal160();
    for (auto kind : {TextureKind::neel_skyrmion, TextureKind::meron, TextureKind::skyrmionium})
      CHECK((target_texture(c, TextureSpec::make(kind), 0.3)[0] - Vec3::UnitX()).norm() < 1e-15);
  }

  TEST_CASE("bimeron is the skyrmion turned by pi/2 about y") {
    const BlochField sk = prepare(TextureKind::neel_skyrmion);
    const BlochField bm = prepare(TextureKind::bimeron);
    CHECK(mean_fidelity(bm, rotate_global(sk, PulseOp::y(kPi / 2.0))).mean ==
          doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("helicity: radial Neel, tangential Bloch") {
    const IonCrystal& c = test::crystal160();
    auto in_plane_angle = [&](const BlochField& f, std::size_t j) {
      const Vec3 v = to_rotated(f[j]);
      const double rx = std::cos(c[j].phi_rad), ry = std::sin(c[j].phi_rad);
      const double radial = v.x() * rx + v.y() * ry, tangential = -v.x() * ry + v.y() * rx;
      return std::atan2(std::abs(tangential), std::abs(radial));
    };
    const BlochField neel = prepare(TextureKind::neel_skyrmion);
    const BlochField bloch_p = prepare(TextureKind::bloch_skyrmion, kPi / 2.0);
    const BlochField bloch_m = prepare(TextureKind::bloch_skyrmion, 3.0 * kPi / 2.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double rn = c.normalized_radius(j);
      if (rn == 0.0 || std::abs(std::sin(kPi * rn)) < 1e-3) continue;
      CHECK(in_plane_angle(neel, j) < 1e-6);
      CHECK(in_plane_angle(bloch_p, j) > kPi / 2.0 - 1e-6);
      CHECK(in_plane_angle(bloch_m, j) > kPi / 2.0 - 1e-6);
    }
  }

  TEST_CASE("domain-wall target and ideal preparation") {
    const IonCrystal& c = test::crystal160();
    const DriveParams p = test::paper_drive(c);
    const TextureSpec dw = TextureSpec::make(TextureKind::domain_wall);
    const BlochField target = target_texture(c, dw, p.psi);
    TextureSpec drive_only = TextureSpec::make(TextureKind::neel_skyrmion);
    drive_only.drive_angle = kPi / 10.0;
    const BlochField inner = prepare_texture(c, p, drive_only);
    const BlochField ideal = prepare_domain_wall(c, p, BeamParams{}, 1,
                                                 {kPi / 10.0, RepumpMode::expectation, true});
    const Vec3 reset = rotate(Vec3::UnitZ(), PulseOp::y(-kPi / 2.0));
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c[j].r_um >= c.radius() / 2.0) {
        CHECK((target[j] - reset).norm() < 1e-15);
        CHECK((ideal[j] - reset).norm() < 1e-12);
      } else {
        CHECK((ideal[j] - inner[j]).norm() < 1e-12);
      }
    }
    const double psi = std::abs(order_parameter(c, ideal));
    CHECK(psi > 0.0);
    CHECK(psi < 0.1);
  }

  TEST_CASE("repump exposure") {
    BeamParams beam;
    beam.peak_repump_rate = calibrate_peak_rate(beam);
    CHECK(repump_exposure(0.0, 0.0, beam) < 1e-6);
    CHECK(-std::expm1(-repump_exposure(165.0, 0.3, beam)) > 0.99);
    CHECK(-std::expm1(-repump_exposure(beam.sweep_end_um, 0.0, beam)) > 0.999);
    CHECK_THROWS_AS(repump_exposure(10.0, 0.0, BeamParams{}), InvalidParameter);
  }

  TEST_CASE("expectation-mode repump is monotone in the peak rate") {
    const IonCrystal& c = test::crystal160();
    const BlochField f = rotate_global(prepare(TextureKind::neel_skyrmion), PulseOp::y(kPi / 2.0));
    BeamParams beam;
    const double base = calibrate_peak_rate(beam);
    BlochField prev = f;
    for (double scale : {0.1, 0.5, 1.0, 3.0}) {
      beam.peak_repump_rate = base * scale;
      const BlochField out = apply_repump_sweep(c, f, beam, 0, RepumpMode::expectation);
      for (std::size_t j = 0; j < c.size(); ++j) CHECK(out[j].z() >= prev[j].z() - 1e-15);
      prev = out;
    }
  }

  TEST_CASE("deterministic reset is idempotent") {
    const BlochField f({Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitZ()});
    const std::vector<double> p{1.0, 0.0, 1.0};
    const BlochField once = apply_reset(f, p, RepumpMode::bernoulli, 4);
    CHECK(apply_reset(once, p, RepumpMode::bernoulli, 9) == once);
    CHECK(once[0] == Vec3::UnitZ());
    CHECK(once[1] == Vec3::UnitY());
    CHECK_THROWS_AS(apply_reset(f, {1.0}, RepumpMode::bernoulli, 0), InvalidParameter);
  }

  TEST_CASE("sweep schedule") {
    BeamParams beam;
    const auto s = sweep_schedule(beam);
    REQUIRE(s.size() == 23);
    CHECK(s.front().position_um == doctest::Approx(220.0));
    CHECK(s.back().position_um == doctest::Approx(110.0));
    beam.power_table = {1.0, 2.0};
    CHECK_THROWS_AS(beam.validate(), InvalidParameter);
  }
}
