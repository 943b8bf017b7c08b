// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spintex/geometry.hpp"
#include "spintex/spin_field.hpp"

namespace spintex {

/// B(t) = B sin(2 pi f (t - t0)) with linear Zeeman coupling Gamma.
struct NoiseParams {
  double B_nT = 0.0;
  double f_hz = 100.0;
  double t0_s = 0.0;
  double gamma = kTwoPi * 28.0;  // rad/s per nT

  void validate() const;
};

/// Gamma [int_0^{T/2} B dt - int_{T/2}^{T} B dt], closed form.
double spin_echo_phase(const NoiseParams& noise, double T);

/// The same echo for a constant field B0; the two arms cancel exactly.
double spin_echo_phase_constant(double B0_nT, double gamma, double T);

/// Amplitude of the echo phase as a function of t0:
/// phi_SE(T; t0) = A(T) cos(2 pi f t0 - alpha), A = 4 Gamma B / w sin^2(w T / 4).
double echo_phase_amplitude(const NoiseParams& noise, double T);

/// atan2(sy, sx) in (-pi, pi]. Throws UndefinedPhase for (0, 0).
double extract_phase(double sx, double sy);

enum class T0Mode { fixed, random_uniform };

struct EchoPoint {
  double T = 0.0;
  double order_parameter = 0.0;  // |Psi|(T)
  double retention = 0.0;        // |Psi|(T) / |Psi|(0)
  double mean_cos = 1.0;         // <cos phi_SE> over t0 samples
  double mean_sin = 0.0;
};

/// Spin-echo on a lab-frame texture. Each spin is rotated about the dressed
/// quantization axis (lab x) by the common phase phi_SE(T; t0), which
/// multiplies Psi by a phase. In random mode t0 is drawn uniformly over one
/// modulation period from per-sample streams and the resulting fields are
/// averaged, so the retention is |<exp(i phi_SE)>|.
std::vector<EchoPoint> simulate_echo_decay(const IonCrystal& crystal, const BlochField& texture,
                                           const NoiseParams& noise, std::span<const double> T,
                                           T0Mode mode, std::size_t n_samples,
                                           std::uint64_t seed);

/// |J0(A(T))|: the random-t0 retention in closed form.
double echo_retention_closed_form(const NoiseParams& noise, double T);

/// Amplitude B giving retention `target` at time T (first root of
/// J0(A) = target, A in (0, 2.4048)).
double calibrate_amplitude(const NoiseParams& noise, double T, double target);

struct NoiseFitOptions {
  double f_min_hz = 0.0;  // 0: 1 / max(T)
  double f_max_hz = 1000.0;
  double f_step_hz = 0.5;
};

struct NoiseFit {
  NoiseParams params;
  double rss = 0.0;
  double residual_norm = 0.0;
};

/// Least-squares fit of (B, f, t0) to (T, phi_SE) samples. For each trial
/// frequency the model is linear in (B cos w t0, B sin w t0), which gives
/// the starting points; the best few are refined with Levenberg-Marquardt.
/// B is returned positive and t0 in [0, 1/f).
NoiseFit fit_noise_model(std::span<const std::pair<double, double>> series, double gamma,
                         const NoiseFitOptions& options = {});

}  // namespace spintex
