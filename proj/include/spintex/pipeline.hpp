// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "spintex/diagnostics.hpp"
#include "spintex/measurement.hpp"
#include "spintex/protocols.hpp"

namespace spintex {

using ShotTriple = std::array<ShotRecord, 3>;

/// Lab-frame readout of one field along x, y and z. Each basis draws from
/// its own stream derived from `seed`.
ShotTriple measure_field(const BlochField& field, std::size_t n_shots, double epsilon,
                         std::uint64_t seed, unsigned workers = 1);

/// Readout with shot-to-shot ODF phase jitter: every shot is taken on a
/// texture prepared with psi + N(0, sigma). sigma = 0 reduces to
/// measure_field on a single preparation.
ShotTriple measure_texture(const IonCrystal& crystal, const DriveParams& params,
                           const TextureSpec& spec, std::size_t n_shots, double epsilon,
                           double psi_jitter, std::uint64_t seed, unsigned workers = 1);

struct BinnedAnalysis {
  BinnedField binned;
  DiagnosticsReport report;
  double phase_offset = 0.0;
};

/// Bin, reconstruct and characterise. Q is evaluated on the reconstructed
/// bins in the rotated basis with short vectors excluded, |Psi| on the lab
/// bins, and F against the bin-averaged target. With fit_phase the target
/// is first aligned by fit_phase_offset.
BinnedAnalysis analyze_shots(const IonCrystal& crystal, const ShotTriple& shots,
                             const TargetFn& target, std::size_t n_radial,
                             std::size_t n_azimuthal, bool fit_phase = false,
                             const BinOptions& options = {});

/// Diagnostics of a per-ion field against a per-ion target.
DiagnosticsReport analyze_field(const IonCrystal& crystal, const BlochField& field,
                                const BlochField& target);

}  // namespace spintex
