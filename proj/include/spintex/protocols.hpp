// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spintex/dynamics.hpp"
#include "spintex/geometry.hpp"
#include "spintex/spin_field.hpp"

namespace spintex {

enum class TextureKind {
  neel_skyrmion,
  bloch_skyrmion,
  anti_skyrmion,
  bimeron,
  meron,
  skyrmionium,
  domain_wall,
};

std::string_view to_string(TextureKind kind);
/// Throws InvalidParameter for an unknown name.
TextureKind texture_kind_from_string(std::string_view name);

/// Drive area omega_R t plus the global pulses applied after the drive.
struct TextureSpec {
  TextureKind kind = TextureKind::neel_skyrmion;
  double drive_angle = kPi;
  std::vector<PulseOp> post_pulses;
  double helicity = kPi / 2.0;  // bloch_skyrmion only

  /// Default drive area and pulse table for a kind: skyrmions pi, meron
  /// pi/2, skyrmionium 2 pi, domain wall pi/10; Bloch skyrmion
  /// R_x(pi - helicity), bimeron pi/2|y, anti-skyrmion pi|y.
  static TextureSpec make(TextureKind kind, double helicity = kPi / 2.0);

  void validate() const;
};

/// Lab-frame target vector as a function of (normalized radius, azimuth).
using TargetFn = std::function<Vec3(double r_norm, double phi)>;

/// Analytic, noise-free target for a texture at ODF phase psi.
TargetFn texture_target(const TextureSpec& spec, double psi);

/// target_texture evaluated on every ion.
BlochField target_texture(const IonCrystal& crystal, const TextureSpec& spec, double psi);

struct PrepareOptions {
  /// Integrate the Bloch ODE instead of the closed form.
  bool use_ode = false;
  unsigned workers = 1;
};

/// Drive from +X for drive_angle / omega_R, then apply the post pulses.
/// A domain_wall spec uses the ideal mask (outer half reset exactly).
BlochField prepare_texture(const IonCrystal& crystal, const DriveParams& params,
                           const TextureSpec& spec, const PrepareOptions& options = {});

struct BeamParams {
  double waist_um = 18.0;          // 1/e^2 intensity radius
  double sweep_start_um = 220.0;
  double sweep_end_um = 110.0;
  double step_um = 5.0;
  double dwell_s = 4.0 * 12.8e-6;  // four rotation periods
  double peak_repump_rate = 0.0;   // 1/s; 0 means calibrate
  double rotation_period_s = 12.8e-6;
  double beam_azimuth = 0.0;       // lab-frame azimuth of the sweep line
  /// Optional power multiplier per sweep position (start -> end).
  std::vector<double> power_table;
  int samples_per_period = 720;

  void validate() const;
  /// Beam radii visited, from sweep_start down to sweep_end inclusive.
  std::vector<double> positions() const;
  double power_at(std::size_t index) const;
};

/// Peak rate that gives reset probability `p_target` to an ion orbiting on
/// the ring through the beam centre when the beam is parked at sweep_end
/// for one dwell.
double calibrate_peak_rate(const BeamParams& beam, double p_target = 0.999);

/// Repump exposure integral sum_k rate * power_k * int exp(-2 d(t)^2 / w^2) dt
/// along the ion's orbit for every sweep position. Requires a resolved
/// (non-zero) peak rate.
double repump_exposure(double r_um, double phi_rad, const BeamParams& beam);

enum class RepumpMode { bernoulli, expectation };

/// p_j = 1 - exp(-E_j) per ion.
std::vector<double> reset_probabilities(const IonCrystal& crystal, const BeamParams& beam);

/// Ideal mask: p = 1 for r >= threshold, 0 below.
std::vector<double> ideal_reset_probabilities(const IonCrystal& crystal, double threshold_um);

/// Replaces u by (0, 0, 1) with probability p (bernoulli, one seeded stream
/// per ion) or mixes u <- p (0,0,1) + (1 - p) u (expectation).
BlochField apply_reset(const BlochField& field, const std::vector<double>& probabilities,
                       RepumpMode mode, std::uint64_t seed);

/// Beam sweep over a lab-frame field. A zero peak rate is calibrated first.
BlochField apply_repump_sweep(const IonCrystal& crystal, const BlochField& field,
                              const BeamParams& beam, std::uint64_t seed,
                              RepumpMode mode = RepumpMode::bernoulli);

struct DomainWallOptions {
  double drive_angle = kPi / 10.0;
  RepumpMode mode = RepumpMode::bernoulli;
  /// Overrides the beam with the ideal r >= R/2 mask.
  bool ideal_beam = false;
};

/// drive -> pi/2|y -> repump sweep -> -pi/2|y, in the lab frame.
BlochField prepare_domain_wall(const IonCrystal& crystal, const DriveParams& params,
                               const BeamParams& beam, std::uint64_t seed,
                               const DomainWallOptions& options = {});

struct SweepStep {
  double position_um;
  double dwell_s;
  double power;
};
std::vector<SweepStep> sweep_schedule(const BeamParams& beam);

/// (r_j, P(up along Z')) per ion for a field in either basis.
std::vector<std::pair<double, double>> up_probability_profile(const IonCrystal& crystal,
                                                              const BlochField& field);

}  // namespace spintex
