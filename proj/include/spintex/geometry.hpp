// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "spintex/types.hpp"

namespace spintex {

/// Position of one ion in the co-rotating frame.
struct IonPosition {
  double r_um = 0.0;
  double phi_rad = 0.0;  // in [0, 2pi)

  double x_um() const;
  double y_um() const;

  bool operator==(const IonPosition&) const = default;
};

/// Rotating-frame ion positions plus the crystal radius and nominal spacing.
///
/// Immutable after construction. R is the largest ion radius, so the
/// outermost ions sit at normalized radius 1.
class IonCrystal {
 public:
  /// Validates and adopts explicit positions. `radius_um` must bound every
  /// ion radius.
  IonCrystal(std::vector<IonPosition> positions, double radius_um,
             double spacing_um);

  std::size_t size() const { return positions_.size(); }
  const std::vector<IonPosition>& positions() const { return positions_; }
  const IonPosition& operator[](std::size_t i) const { return positions_[i]; }
  double radius() const { return radius_; }
  double spacing() const { return spacing_; }

  double normalized_radius(std::size_t i) const {
    return positions_[i].r_um / radius_;
  }

  /// Same crystal rigidly rotated by `delta` about the origin.
  IonCrystal rotated(double delta) const;

  bool operator==(const IonCrystal&) const = default;

 private:
  std::vector<IonPosition> positions_;
  double radius_;
  double spacing_;
};

struct CrystalOptions {
  double spacing_um = 0.0;
  double radius_um = 0.0;
  /// Radius of the uniform-in-disk positional jitter; 0 disables it.
  double jitter_um = 0.0;
  std::uint64_t seed = 0;
};

/// Triangular lattice with one site at the origin, clipped to a disk.
/// Sites are ordered by radius, then azimuth. Deterministic.
IonCrystal generate_crystal(double spacing_um, double radius_um);
IonCrystal generate_crystal(const CrystalOptions& options);

/// Number of lattice sites of the given spacing inside the disk.
std::size_t lattice_site_count(double spacing_um, double radius_um);

/// Bisects for the lattice spacing whose disk of `radius_um` holds the site
/// count closest to `target_count`.
double spacing_for_ion_count(std::size_t target_count, double radius_um);

}  // namespace spintex
