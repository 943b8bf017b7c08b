// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "spintex/geometry.hpp"
#include "spintex/spin_field.hpp"

namespace spintex {

/// Every symbol of the initialisation drive, in SI angular units internally
/// (rad/s, rad, 1/um, um). Angles in degrees are kept as given because they
/// only describe the beam geometry.
struct DriveParams {
  double omega_R = 0.0;     // Rabi rate at the crystal edge, rad/s
  double delta_ac = 0.0;    // two-photon light shift, rad/s
  double eta_x = 0.0;       // in-plane Lamb-Dicke parameter dk_x * R
  double psi = kPi / 2.0;   // relative ODF phase, rad
  double omega_mw = 0.0;    // microwave Rabi rate, rad/s
  double omega_rot = 0.0;   // crystal rotation, rad/s
  double mu_r = 0.0;        // ODF beat note, rad/s
  double dk_x = 0.0;        // 1/um
  double dk_z = 0.0;        // 1/um
  double delta_theta_deg = 0.0;
  double theta_odf_deg = 0.0;
  double R_um = 0.0;

  /// Builds a consistent parameter set from the edge Rabi rate and eta_x:
  /// delta_ac = 2 omega_R / eta_x, dk_x = eta_x / R, dk_z from the tilt.
  /// mu_r is set to the resonant sideband omega_mw + omega_rot.
  static DriveParams resonant(double omega_R, double eta_x, double R_um,
                              double omega_mw, double omega_rot,
                              double psi = kPi / 2.0,
                              double delta_theta_deg = 0.04,
                              double theta_odf_deg = 18.0);

  /// Experimental operating point: omega_R/2pi = 1.56 kHz, eta_x = 0.66,
  /// omega_r/2pi = 78 kHz, R = 150 um, with the given microwave rate in Hz.
  static DriveParams experiment(double omega_mw_hz = 26e3);

  /// Throws InvalidParameter unless omega_R = delta_ac eta_x / 2 and
  /// eta_x = dk_x R hold to 1e-9 relative.
  void validate() const;

  bool is_resonant(double rel_tol = 1e-9) const;

  /// Same drive with eta_x scaled by `factor` at fixed delta_ac (so omega_R
  /// scales too and reaching a fixed pulse area takes 1/factor longer).
  DriveParams with_eta_scaled(double factor) const;
};

/// Closed-form evolution of all spins from +X under the effective drive:
/// u = (cos a, sin a cos chi, -sin a sin chi), a = r~ omega_R t,
/// chi = phi + psi.
BlochField evolve_closed_form(const IonCrystal& crystal, const DriveParams& params,
                              double t);

/// Single-ion closed form, used by target construction.
Vec3 closed_form_vector(double r_norm, double chi, double drive_angle);

struct OdeOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double norm_tol = 1e-9;
  unsigned workers = 1;
};

/// Integrates dv/dt = M_j v_j per ion with adaptive Dormand-Prince steps.
/// Supports arbitrary initial fields. Throws NumericalFailure naming the
/// worst ion if the norm drifts by more than `norm_tol`.
BlochField evolve_bloch_ode(const IonCrystal& crystal, const DriveParams& params,
                            const BlochField& initial, double t,
                            const OdeOptions& options = {});

struct FullDriveOptions {
  double convergence_tol = 1e-6;
  unsigned workers = 1;
};

/// Integrates the dressed-frame drive without the small-angle or
/// rotating-wave approximations, starting from +X. In-plane positions are
/// classical, x_j(t) = r_j cos(omega_r t + phi_j). Each ion's SU(2)
/// propagator is built from `substeps` fourth-order Magnus steps; the run is
/// repeated with 2*substeps and NumericalFailure is thrown if any component
/// moves by more than `convergence_tol`.
BlochField evolve_full_drive(const IonCrystal& crystal, const DriveParams& params,
                             double t, std::size_t substeps,
                             const FullDriveOptions& options = {});

/// Step count resolving the fastest drive component with ~40 steps per cycle.
std::size_t default_substeps(const DriveParams& params, double t);

/// Mean single-ion infidelity (1 - u.v)/2 between two pure-state fields.
double mean_infidelity(const BlochField& a, const BlochField& b);

struct RwaReport {
  bool pass = false;
  double ratio = 0.0;       // omega_R / min bound
  double min_bound = 0.0;   // rad/s
  double ratio_2omega_rot = 0.0;
  double ratio_2omega_mw = 0.0;
  double ratio_2sum = 0.0;
  double threshold = 0.1;
};

/// omega_R against min(|2 omega_r|, |2 Omega|, |2(omega_r + Omega)|).
RwaReport check_rwa(const DriveParams& params, double threshold = 0.1);

}  // namespace spintex
