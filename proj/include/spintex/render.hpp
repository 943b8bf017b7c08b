// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "spintex/geometry.hpp"
#include "spintex/io.hpp"
#include "spintex/spin_field.hpp"

namespace spintex::render {

enum class Style { quiver, heatmap_x, heatmap_y, heatmap_z };

/// Parses "quiver", "heatmap-x", "heatmap-y", "heatmap-z".
Style style_from_string(const std::string& name);

/// Diverging color for a value on the fixed scale [-1, 1]: blue at -1,
/// white at 0, red at +1. Values outside the scale are clamped.
std::string color_for(double value);

/// Per-ion plot. Quiver: arrows along the first two components, hue from
/// the third. Heatmap: one disk per ion colored by the chosen component.
/// Components are taken in the field's own basis.
std::string field_svg(const IonCrystal& crystal, const BlochField& field, Style style,
                      const std::string& title = "");

/// Polar-bin plot of a binned export. Empty or unreconstructed bins are
/// drawn hatched grey.
std::string binned_svg(const std::vector<io::BinnedRow>& rows, double radius_um, Style style,
                       const std::string& title = "");

}  // namespace spintex::render
