// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "spintex/geometry.hpp"
#include "spintex/protocols.hpp"
#include "spintex/spin_field.hpp"

namespace spintex {

/// Projection axis. Components are taken in whatever basis the measured
/// field is expressed in, so a rotated-basis field measured along z reads
/// out Z'.
enum class Axis { x = 0, y = 1, z = 2 };

std::string_view to_string(Axis axis);
Axis axis_from_string(std::string_view name);

/// Binary outcomes (1 = bright / up) of n_shots projective readouts of every
/// ion along one axis.
struct ShotRecord {
  Axis basis = Axis::z;
  std::size_t n_shots = 0;
  std::size_t n_ions = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  std::vector<std::uint8_t> outcomes;  // row-major: shot * n_ions + ion

  std::uint8_t at(std::size_t shot, std::size_t ion) const {
    return outcomes[shot * n_ions + ion];
  }
  /// Mean outcome of one ion over all shots.
  double ion_mean(std::size_t ion) const;
  void validate() const;

  bool operator==(const ShotRecord&) const = default;
};

/// Each shot of ion j reads 1 with p' = p (1 - eps) + (1 - p) eps, where
/// p = (1 + u_axis) / 2. Ion j draws from its own stream keyed by
/// (seed, axis, j), so the output does not depend on `workers`.
ShotRecord simulate_shots(const BlochField& field, Axis basis, std::size_t n_shots,
                          double epsilon, std::uint64_t seed, unsigned workers = 1);

struct Bin {
  double r_center = 0.0;    // um
  double phi_center = 0.0;  // rad, shifted by the phase offset after reconstruction
  std::array<double, 3> p_up{};
  std::array<bool, 3> has_basis{};
  std::array<std::size_t, 3> samples{};  // ions x shots per basis
  std::size_t n_ions = 0;
  Vec3 u = Vec3::Zero();
  bool reconstructed = false;
  std::vector<std::size_t> ions;

  bool empty() const { return n_ions == 0; }
};

/// Polar grid of n_radial equal-width annuli (in r / R) by n_azimuthal
/// equal-width sectors. Empty bins are kept and flagged, never filled in.
struct BinnedField {
  std::vector<Bin> bins;  // radial-major: bins[ir * n_azimuthal + ia]
  std::size_t n_radial = 0;
  std::size_t n_azimuthal = 0;
  double radius_um = 0.0;
  double phase_offset = 0.0;

  std::size_t non_empty() const;
};

struct BinOptions {
  /// Rigidly rotate the crystal by an independent uniform angle per shot
  /// before binning (unlocked crystal orientation).
  bool randomize_orientation = false;
  std::uint64_t orientation_seed = 0;
};

/// Bin index of one ion on the grid.
std::size_t bin_index(double r_norm, double phi, std::size_t n_radial, std::size_t n_azimuthal);

BinnedField bin_polar(const IonCrystal& crystal, std::span<const ShotRecord> records,
                      std::size_t n_radial = 10, std::size_t n_azimuthal = 22,
                      const BinOptions& options = {});

/// u = 2 p - 1 per axis for every non-empty bin. Estimates longer than 1 are
/// projected onto the unit sphere. Bin azimuths are shifted by phase_offset.
/// Throws IncompleteData naming the first missing basis.
BinnedField reconstruct_bloch(const BinnedField& binned, double phase_offset = 0.0);

/// Non-empty reconstructed bins as a pseudo-crystal of bin centres and the
/// matching field, for feeding the diagnostics.
std::pair<IonCrystal, BlochField> binned_sites(const BinnedField& binned,
                                               Basis basis = Basis::lab);

/// Normalized bin average of the target over each bin's ions, with the
/// target evaluated at (r~_j, phi_j + phase_offset). Order matches
/// binned_sites.
BlochField binned_target(const BinnedField& binned, const IonCrystal& crystal,
                         const TargetFn& target, double phase_offset);

/// Mean fidelity of the reconstructed bins against the bin-averaged target.
double binned_fidelity(const BinnedField& binned, const IonCrystal& crystal,
                       const TargetFn& target, double phase_offset);

/// Azimuthal shift (in (-pi, pi]) that maximizes binned_fidelity: 0.5 deg
/// grid scan, then golden-section refinement. Throws NoUniquePhase when the
/// fidelity does not depend on the shift.
double fit_phase_offset(const BinnedField& binned, const IonCrystal& crystal,
                        const TargetFn& target);

}  // namespace spintex
