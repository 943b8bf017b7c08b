// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace spintex {

using Point2 = Eigen::Vector2d;

struct Triangulation {
  /// Vertex indices, counterclockwise in the plane viewed from +z.
  std::vector<std::array<std::size_t, 3>> triangles;
  /// Convex-hull vertices, counterclockwise.
  std::vector<std::size_t> hull;
};

struct DelaunayOptions {
  /// Every point is displaced by this distance in a direction keyed to its
  /// index, which breaks cocircular and collinear ties deterministically.
  double perturbation = 0.0;
  /// Changes the per-index directions; two salts give two valid tie-breaks.
  std::uint64_t salt = 0;
};

/// Delaunay triangulation: sorted sweep builds a valid triangulation, Lawson
/// edge flips make it Delaunay. Throws TriangulationError for fewer than
/// three points, duplicates, or an all-collinear set.
Triangulation delaunay_triangulate(std::span<const Point2> points,
                                   const DelaunayOptions& options = {});

}  // namespace spintex
