// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spintex/types.hpp"

namespace spintex {

/// Which Bloch frame a field is expressed in. `rotated` is the visualisation
/// frame (X', Y', Z') = (Z, Y, -X).
enum class Basis { lab, rotated };

/// One Bloch vector per ion, index-aligned with an IonCrystal.
///
/// Pure states have unit vectors; reconstructed or ensemble-averaged fields
/// may be shorter. Vectors longer than 1 + 1e-9 are rejected.
class BlochField {
 public:
  BlochField() = default;
  explicit BlochField(std::vector<Vec3> vectors, Basis basis = Basis::lab);

  /// `n` copies of `v`.
  static BlochField uniform(std::size_t n, const Vec3& v, Basis basis = Basis::lab);

  std::size_t size() const { return vectors_.size(); }
  Basis basis() const { return basis_; }
  const std::vector<Vec3>& vectors() const { return vectors_; }
  const Vec3& operator[](std::size_t i) const { return vectors_[i]; }

  bool operator==(const BlochField& other) const;

 private:
  std::vector<Vec3> vectors_;
  Basis basis_ = Basis::lab;
};

/// Global rotation of every Bloch vector, right-handed about `axis`.
struct PulseOp {
  Vec3 axis;     // unit norm within 1e-12
  double angle;  // rad

  /// Normalizes `axis`; throws InvalidParameter for a zero axis.
  static PulseOp about(const Vec3& axis, double angle);
  static PulseOp x(double angle) { return {Vec3::UnitX(), angle}; }
  static PulseOp y(double angle) { return {Vec3::UnitY(), angle}; }
  static PulseOp z(double angle) { return {Vec3::UnitZ(), angle}; }
};

/// Rodrigues rotation of a single vector.
Vec3 rotate(const Vec3& v, const PulseOp& pulse);

BlochField rotate_global(const BlochField& field, const PulseOp& pulse);
BlochField rotate_global(const BlochField& field, std::span<const PulseOp> pulses);

/// (ux, uy, uz) -> (uz, uy, -ux).
Vec3 to_rotated(const Vec3& lab);
/// Inverse of to_rotated.
Vec3 to_lab(const Vec3& rotated);

BlochField to_rotated_basis(const BlochField& field);
BlochField to_lab_basis(const BlochField& field);

}  // namespace spintex
