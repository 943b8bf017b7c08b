// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spintex/dynamics.hpp"
#include "spintex/geometry.hpp"
#include "spintex/noise.hpp"
#include "spintex/protocols.hpp"

namespace spintex {

inline constexpr int kSchemaVersion = 1;

/// Experiment configuration. Frequencies are given in Hz in the file and
/// converted to angular frequencies by the accessors below.
struct ExperimentConfig {
  struct Crystal {
    double spacing_um = 0.0;  // 0: derived from n_ions
    std::size_t n_ions = 160;
    double radius_um = 150.0;
    double jitter_um = 0.0;
    std::uint64_t seed = 1;
  } crystal;

  struct Drive {
    double omega_R_hz = 1.56e3;
    double eta_x = 0.66;
    double psi_rad = kPi / 2.0;
    double omega_mw_hz = 25e3;
    double omega_rot_hz = 78e3;
    std::optional<double> mu_r_hz;  // unset: resonant, omega_mw + omega_rot
    double delta_theta_deg = 0.04;
    double theta_odf_deg = 18.0;
    bool use_ode = false;
    std::size_t substeps = 0;  // full drive; 0: automatic
  } drive;

  struct Texture {
    std::string kind = "neel_skyrmion";
    std::optional<double> drive_angle;  // unset: the kind's default
    double helicity = kPi / 2.0;
  } texture;

  struct Measurement {
    std::size_t n_shots = 200;
    double epsilon = 0.02;
    std::size_t n_radial = 10;
    std::size_t n_azimuthal = 22;
    std::uint64_t seed = 2;
    bool randomize_orientation = false;
    bool fit_phase = false;
    double phase_jitter_rad = 0.0;  // shot-to-shot psi jitter, 0 disables
  } measurement;

  struct Beam {
    double waist_um = 18.0;
    double sweep_start_um = 220.0;
    double sweep_end_um = 110.0;
    double step_um = 5.0;
    double dwell_s = 4.0 * 12.8e-6;
    double peak_repump_rate = 0.0;  // 0: calibrate
    double rotation_period_s = 12.8e-6;
    std::vector<double> power_table;
    std::string mode = "bernoulli";  // or "expectation"
    bool ideal = false;
    double drive_angle = kPi / 10.0;
    std::uint64_t seed = 3;
  } beam;

  struct Noise {
    double B_nT = 1.0;
    double f_hz = 100.0;
    double t0_s = 1e-3;
    double gamma_rad_s_per_nT = kTwoPi * 28.0;
    double T_start_s = 0.0;
    double T_stop_s = 20e-3;
    std::size_t T_count = 41;
    std::string t0_mode = "random";  // or "fixed"
    std::size_t n_samples = 10000;
    std::optional<double> calibrate_retention = 0.73;  // unset: use B_nT as given
    double calibrate_T_s = 12e-3;
    double phase_noise_rad = 0.05;
    std::uint64_t seed = 4;
  } noise;

  struct Output {
    std::string directory = "out";
    std::vector<std::string> formats = {"csv", "json", "svg"};
  } output;

  unsigned workers = 1;

  /// Throws ConfigError with the offending key on invalid values.
  void validate() const;

  IonCrystal make_crystal() const;
  DriveParams drive_params(double R_um) const;
  TextureSpec texture_spec() const;
  BeamParams beam_params() const;
  NoiseParams noise_params() const;
  RepumpMode repump_mode() const;
  bool wants(const std::string& format) const;
};

/// Serialized form with every default materialized.
std::string config_to_json(const ExperimentConfig& config);

/// Parses a config document layered over the defaults. Unknown keys and
/// type mismatches raise ConfigError naming the dotted key.
ExperimentConfig config_from_json(const std::string& text);

/// Applies "dotted.key=value" overrides; the value is read as JSON when it
/// parses and as a string otherwise.
ExperimentConfig apply_overrides(const ExperimentConfig& config,
                                 const std::vector<std::string>& overrides);

/// Sets every section seed from one master seed.
void set_master_seed(ExperimentConfig& config, std::uint64_t seed);

}  // namespace spintex
