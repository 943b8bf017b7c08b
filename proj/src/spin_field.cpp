// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/spin_field.hpp"

#include <cmath>
#include <string>

#include "spintex/errors.hpp"

namespace spintex {

BlochField::BlochField(std::vector<Vec3> vectors, Basis basis)
    : vectors_(std::move(vectors)), basis_(basis) {
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    const auto& v = vectors_[i];
    if (!v.allFinite())
      throw InvalidParameter("Bloch vector " + std::to_string(i) + " is not finite");
    if (v.norm() > 1.0 + 1e-9)
      throw InvalidParameter("Bloch vector " + std::to_string(i) + " has norm > 1");
  }
}

BlochField BlochField::uniform(std::size_t n, const Vec3& v, Basis basis) {
  return BlochField(std::vector<Vec3>(n, v), basis);
}

bool BlochField::operator==(const BlochField& other) const {
  return basis_ == other.basis_ && vectors_ == other.vectors_;
}

PulseOp PulseOp::about(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw InvalidParameter("pulse axis must be a non-zero finite vector");
  return {axis / n, angle};
}

Vec3 rotate(const Vec3& v, const PulseOp& pulse) {
  if (pulse.angle == 0.0) return v;
  const double n = pulse.axis.norm();
  if (!(n > 0.0)) throw InvalidParameter("pulse axis has zero norm");
  const Vec3 k = pulse.axis / n;
  const double c = std::cos(pulse.angle);
  const double s = std::sin(pulse.angle);
  return v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c));
}

BlochField rotate_global(const BlochField& field, const PulseOp& pulse) {
  std::vector<Vec3> out;
  out.reserve(field.size());
  for (const auto& v : field.vectors()) out.push_back(rotate(v, pulse));
  return BlochField(std::move(out), field.basis());
}

BlochField rotate_global(const BlochField& field, std::span<const PulseOp> pulses) {
  BlochField out = field;
  for (const auto& p : pulses) out = rotate_global(out, p);
  return out;
}

Vec3 to_rotated(const Vec3& lab) { return {lab.z(), lab.y(), -lab.x()}; }
Vec3 to_lab(const Vec3& rotated) { return {-rotated.z(), rotated.y(), rotated.x()}; }

BlochField to_rotated_basis(const BlochField& field) {
  std::vector<Vec3> out;
  out.reserve(field.size());
  for (const auto& v : field.vectors()) out.push_back(to_rotated(v));
  return BlochField(std::move(out), Basis::rotated);
}

BlochField to_lab_basis(const BlochField& field) {
  std::vector<Vec3> out;
  out.reserve(field.size());
  for (const auto& v : field.vectors()) out.push_back(to_lab(v));
  return BlochField(std::move(out), Basis::lab);
}

}  // namespace spintex
