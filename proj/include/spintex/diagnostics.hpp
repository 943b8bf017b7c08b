// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spintex/geometry.hpp"
#include "spintex/spin_field.hpp"

namespace spintex {

/// Signed solid angle of the spherical triangle (a, b, c), two-argument
/// arctangent form so |Omega| may exceed pi.
double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c);

struct WindingOptions {
  /// Tie-break displacement as a fraction of the crystal spacing.
  double perturbation_fraction = 1e-6;
  std::uint64_t salt = 0;
  /// When set, sites with |u| below `min_norm` are dropped (and counted)
  /// instead of raising DegenerateSpin.
  bool exclude_short = false;
  double min_norm = 0.05;
  bool keep_triangles = false;
};

struct WindingResult {
  double Q = 0.0;
  std::size_t triangle_count = 0;
  std::size_t hull_count = 0;
  std::size_t site_count = 0;
  std::size_t excluded = 0;
  std::vector<std::array<std::size_t, 3>> triangles;  // site indices
  std::vector<double> solid_angles;
};

/// Discrete winding number: Delaunay-triangulate the ion positions, sum the
/// solid angles of the (renormalized) Bloch vectors over counterclockwise
/// triangles, divide by 4 pi. Invariant under any global proper rotation of
/// the spins, so the basis the field is given in does not matter.
WindingResult winding_details(const IonCrystal& crystal, const BlochField& field,
                              const WindingOptions& options = {});
double winding_number(const IonCrystal& crystal, const BlochField& field);

/// Z'-component (rotated basis) of the core, averaged over the ions nearest
/// the crystal centre.
double core_polarity(const IonCrystal& crystal, const BlochField& field);

/// Winding number with its sign tied to the core orientation: +|Q| for a
/// core along +Z', -|Q| for a core along -Z'. This is the convention under
/// which a pi|y flip of a core-down skyrmion reports Q = +1. Falls back to
/// the raw value when the core lies in the plane (|polarity| < 1e-6).
double oriented_winding_number(const IonCrystal& crystal, const BlochField& field);

/// -(1 - cos theta_edge)/2 for the radially symmetric closed-form texture.
double winding_continuum(double theta_edge);

/// (1/N) sum_j r~_j e^{i phi_j} (u_z - i u_y) on lab-frame components; a
/// rotated-basis field is mapped back to the lab frame first.
std::complex<double> order_parameter(const IonCrystal& crystal, const BlochField& field);

struct FidelityResult {
  double mean = 0.0;
  std::vector<double> per_site;
};

/// F_j = (1 + u_j . v_j) / 2. The measured vectors enter unnormalized.
FidelityResult mean_fidelity(const BlochField& field, const BlochField& target);

struct RateFit {
  double omega_R = 0.0;    // rad/s
  double std_error = 0.0;  // rad/s
  double rss = 0.0;
};

/// Fits Q(t) = winding_continuum(omega_R t) by least squares, multi-start
/// over eight initial pulse areas. Needs >= 4 points; a constant series or a
/// fit covering less than half an oscillation throws FitFailure.
RateFit fit_omega_r(std::span<const std::pair<double, double>> q_series);

struct TimedField {
  double t;
  BlochField field;  // lab frame
};

/// Fits the closed-form trajectories to a series of lab-frame fields.
RateFit fit_omega_r(const IonCrystal& crystal, std::span<const TimedField> series,
                    double psi);

struct EdgeFit {
  double width_10_90 = 0.0;  // um
  double std_error = 0.0;    // um
  double sigma = 0.0;
  double r0 = 0.0;
  double p_inner = 0.0;
  double p_outer = 0.0;
  double rss = 0.0;
};

/// 10-90 % width of an error-function edge: 2 sqrt(2) erfinv(0.8) sigma.
inline constexpr double kEdgeWidthPerSigma = 2.5631031310892007;

/// Fits p(r) = p0 + (p1 - p0)(1 + erf((r - r0)/(sqrt(2) sigma)))/2.
EdgeFit fit_edge_width(std::span<const std::pair<double, double>> profile);

struct DiagnosticsReport {
  double Q = 0.0;
  double Q_oriented = 0.0;
  std::complex<double> order_parameter;
  double mean_fidelity = 0.0;
  std::size_t triangle_count = 0;
  std::size_t hull_count = 0;
  std::size_t site_count = 0;
  std::size_t excluded_sites = 0;
  double omega_R_fit = 0.0;
  double omega_R_std_error = 0.0;
  double edge_width_10_90 = 0.0;
  double edge_width_std_error = 0.0;
  bool has_omega_R = false;
  bool has_edge_width = false;
};

}  // namespace spintex
