// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spintex/diagnostics.hpp"
#include "spintex/geometry.hpp"
#include "spintex/measurement.hpp"
#include "spintex/noise.hpp"
#include "spintex/protocols.hpp"
#include "spintex/spin_field.hpp"

namespace spintex::io {

namespace fs = std::filesystem;

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

// Crystal: {"R_um", "spacing_um", "ions": [{"id", "r_um", "phi_rad"}]}
std::string crystal_to_json(const IonCrystal& crystal);
IonCrystal crystal_from_json(const std::string& text);

// Bloch field: "# basis: lab|rotated" then "id,ux,uy,uz" rows.
void write_field_csv(std::ostream& os, const BlochField& field);
BlochField read_field_csv(std::istream& is);

// Shot record, compact CSV: comment header with the metadata, then
// "shot,ion,bit" rows.
void write_shots_csv(std::ostream& os, const ShotRecord& record);
ShotRecord read_shots_csv(std::istream& is);

// Shot record, dense binary: one byte per outcome at `path`, metadata in
// `path` + ".json".
void write_shots_binary(const fs::path& path, const ShotRecord& record);
ShotRecord read_shots_binary(const fs::path& path);

// r_center,phi_center,px,py,pz,ux,uy,uz,n_ions; empty or unreconstructed
// components are written as "nan".
void write_binned_csv(std::ostream& os, const BinnedField& binned);
struct BinnedRow {
  double r_center, phi_center;
  Vec3 p, u;
  std::size_t n_ions;
};
std::vector<BinnedRow> read_binned_csv(std::istream& is);

std::string report_to_json(const DiagnosticsReport& report);

void write_sweep_csv(std::ostream& os, const std::vector<SweepStep>& schedule);

struct EchoRow {
  double T, sx, sy, phi_se;
};
void write_echo_csv(std::ostream& os, const std::vector<EchoRow>& rows);

/// Writes a two-or-more column numeric table with a header.
void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

}  // namespace spintex::io
