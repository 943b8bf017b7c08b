// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "spintex/errors.hpp"
#include "spintex/noise.hpp"
#include "spintex/protocols.hpp"
#include "spintex/rng.hpp"
#include "support.hpp"

using namespace spintex;

namespace {

// Simpson quadrature of Gamma B(t) over [a, b].
double field_integral(const NoiseParams& n, double a, double b) {
  const int m = 4000;
  const double h = (b - a) / m;
  auto g = [&](double t) { return n.gamma * n.B_nT * std::sin(kTwoPi * n.f_hz * (t - n.t0_s)); };
  double s = g(a) + g(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3.0;
}

double quadrature_echo(const NoiseParams& n, double T) {
  return field_integral(n, 0.0, T / 2.0) - field_integral(n, T / 2.0, T);
}

NoiseParams default_noise() {
  NoiseParams n;
  n.B_nT = 1.0;
  n.f_hz = 100.0;
  n.t0_s = 1e-3;
  return n;
}

double amplitude(const NoiseParams& n, double T) {
  const double w = kTwoPi * n.f_hz;
  const double s = std::sin(w * T / 4.0);
  return 4.0 * n.gamma * n.B_nT / w * s * s;
}

}  // namespace

TEST_SUITE("noise") {
  TEST_CASE("echo phase against quadrature") {
    NoiseParams n = default_noise();
    for (double t0 : {0.0, 1e-3, 3.7e-3})
      for (double T : {1e-3, 4e-3, 12e-3, 20e-3}) {
        n.t0_s = t0;
        CHECK(std::abs(spin_echo_phase(n, T) - quadrature_echo(n, T)) < 1e-10);
      }
  }

  TEST_CASE("linear in the amplitude, blind to a constant field, periodic in t0") {
    NoiseParams n = default_noise();
    const double base = spin_echo_phase(n, 7e-3);
    n.B_nT = 2.5;
    CHECK(spin_echo_phase(n, 7e-3) == doctest::Approx(2.5 * base).epsilon(1e-12));
    n.B_nT = 1.0;
    n.t0_s += 1.0 / n.f_hz;
    CHECK(spin_echo_phase(n, 7e-3) == doctest::Approx(base).epsilon(1e-9));
    CHECK(spin_echo_phase_constant(3.0, n.gamma, 7e-3) == 0.0);
    CHECK(spin_echo_phase(n, 0.0) == 0.0);
    // Full modulation period: both arms see half a cycle of opposite sign.
    n.t0_s = 0.0;
    CHECK(std::abs(spin_echo_phase(n, 10e-3)) == doctest::Approx(amplitude(n, 10e-3)));
  }

  TEST_CASE("amplitude bounds the phase over t0") {
    NoiseParams n = default_noise();
    const double T = 6e-3;
    double worst = 0.0;
    for (int k = 0; k < 400; ++k) {
      n.t0_s = k / (400.0 * n.f_hz);
      worst = std::max(worst, std::abs(spin_echo_phase(n, T)));
    }
    CHECK(echo_phase_amplitude(n, T) == doctest::Approx(amplitude(n, T)).epsilon(1e-12));
    CHECK(worst == doctest::Approx(amplitude(n, T)).epsilon(1e-3));
  }

  TEST_CASE("phase extraction") {
    CHECK(extract_phase(1.0, 0.0) == 0.0);
    CHECK(extract_phase(0.0, 1.0) == doctest::Approx(kPi / 2));
    CHECK(extract_phase(-1.0, 0.0) == doctest::Approx(kPi));
    CHECK(extract_phase(-1.0, -0.0) == doctest::Approx(kPi));
    CHECK_THROWS_AS(extract_phase(0.0, 0.0), UndefinedPhase);
  }

  TEST_CASE("fixed t0 keeps the order parameter") {
    const IonCrystal& c = test::crystal160();
    const BlochField sk = target_texture(c, TextureSpec::make(TextureKind::neel_skyrmion), kPi / 2);
    const std::vector<double> T{0.0, 3e-3, 12e-3};
    for (const auto& p : simulate_echo_decay(c, sk, default_noise(), T, T0Mode::fixed, 1, 0))
      CHECK(std::abs(p.retention - 1.0) < 1e-9);
  }

  TEST_CASE("random t0 follows the Bessel envelope") {
    const IonCrystal& c = test::crystal160();
    const BlochField sk = target_texture(c, TextureSpec::make(TextureKind::neel_skyrmion), kPi / 2);
    NoiseParams n = default_noise();
    n.B_nT = 2.0;
    const std::vector<double> T{2e-3, 6e-3, 12e-3, 18e-3};
    const auto pts = simulate_echo_decay(c, sk, n, T, T0Mode::random_uniform, 10000, 5);
    for (std::size_t k = 0; k < T.size(); ++k) {
      const double A = amplitude(n, T[k]);
      const double j0 = std::cyl_bessel_j(0.0, A);
      // Standard error of the sample mean of cos(A cos theta).
      const double var = (1.0 + std::cyl_bessel_j(0.0, 2.0 * A)) / 2.0 - j0 * j0;
      CHECK(std::abs(pts[k].retention - std::abs(j0)) < 4.0 * std::sqrt(var / 10000.0) + 1e-3);
      CHECK(echo_retention_closed_form(n, T[k]) == doctest::Approx(std::abs(j0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(simulate_echo_decay(c, sk, n, T, T0Mode::random_uniform, 10, 5),
                    InvalidParameter);
  }

  TEST_CASE("amplitude calibration to a retention of 0.73") {
    NoiseParams n = default_noise();
    n.B_nT = calibrate_amplitude(n, 12e-3, 0.73);
    CHECK(echo_retention_closed_form(n, 12e-3) == doctest::Approx(0.73).epsilon(1e-6));
    CHECK(std::abs(std::cyl_bessel_j(0.0, amplitude(n, 12e-3)) - 0.73) < 1e-6);
    const IonCrystal& c = test::crystal160();
    const BlochField sk = target_texture(c, TextureSpec::make(TextureKind::neel_skyrmion), kPi / 2);
    const std::vector<double> T{12e-3};
    const auto p = simulate_echo_decay(c, sk, n, T, T0Mode::random_uniform, 10000, 1);
    CHECK(std::abs(p[0].retention - 0.73) < 0.01);
    CHECK_THROWS_AS(calibrate_amplitude(n, 12e-3, 1.5), InvalidParameter);
  }

  TEST_CASE("noise model fit recovers the frequency") {
    NoiseParams truth = default_noise();
    truth.B_nT = 1.3;
    truth.f_hz = 87.0;
    truth.t0_s = 2.2e-3;
    auto eng = rng::make_engine(42, 0, 0);
    std::vector<std::pair<double, double>> series;
    for (int k = 0; k <= 40; ++k) {
      const double T = k * 0.5e-3;
      const double u1 = 1.0 - rng::uniform01(eng), u2 = rng::uniform01(eng);
      const double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
      series.emplace_back(T, spin_echo_phase(truth, T) + 0.05 * g);
    }
    const NoiseFit fit = fit_noise_model(series, truth.gamma);
    CHECK(std::abs(fit.params.f_hz - truth.f_hz) < 2.0);
    CHECK(fit.params.B_nT == doctest::Approx(truth.B_nT).epsilon(0.1));
    CHECK(fit.params.t0_s >= 0.0);
    CHECK(fit.params.t0_s < 1.0 / fit.params.f_hz);
  }

  TEST_CASE("fit failures") {
    std::vector<std::pair<double, double>> zero;
    for (int k = 0; k < 20; ++k) zero.emplace_back(k * 1e-3, 0.0);
    CHECK_THROWS_AS(fit_noise_model(zero, kTwoPi * 28.0), FitFailure);
    CHECK_THROWS_AS(fit_noise_model(std::span(zero).first(4), kTwoPi * 28.0), FitFailure);
  }
}
