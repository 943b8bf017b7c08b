// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Geometry>
#include <numbers>

namespace spintex {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Hz -> rad/s.
constexpr double angular(double hz) { return kTwoPi * hz; }

/// Wraps an angle into [0, 2pi).
double wrap_angle(double phi);

}  // namespace spintex
