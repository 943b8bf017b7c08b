// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spintex/dynamics.hpp"
#include "spintex/geometry.hpp"

namespace spintex::test {

/// The ~160-ion, R = 150 um crystal used throughout.
inline const IonCrystal& crystal160() {
  static const IonCrystal c = generate_crystal(spacing_for_ion_count(160, 150.0), 150.0);
  return c;
}

inline DriveParams paper_drive(const IonCrystal& c = crystal160()) {
  DriveParams p = DriveParams::experiment(25e3);
  p.R_um = c.radius();
  p.dk_x = p.eta_x / p.R_um;
  return p;
}

}  // namespace spintex::test
