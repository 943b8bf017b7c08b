// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "spintex/errors.hpp"
#include "spintex/rng.hpp"

namespace spintex {

ShotTriple measure_field(const BlochField& field, std::size_t n_shots, double epsilon,
                         std::uint64_t seed, unsigned workers) {
  ShotTriple out;
  for (int k = 0; k < 3; ++k)
    out[k] = simulate_shots(field, static_cast<Axis>(k), n_shots, epsilon,
                            rng::stream_seed(seed, rng::kShots, 1000 + k), workers);
  return out;
}

ShotTriple measure_texture(const IonCrystal& crystal, const DriveParams& params,
                           const TextureSpec& spec, std::size_t n_shots, double epsilon,
                           double psi_jitter, std::uint64_t seed, unsigned workers) {
  if (psi_jitter < 0.0) throw InvalidParameter("phase jitter must be >= 0");
  if (psi_jitter == 0.0) {
    PrepareOptions opt;
    opt.workers = workers;
    return measure_field(prepare_texture(crystal, params, spec, opt), n_shots, epsilon, seed,
                         workers);
  }
  ShotTriple out;
  for (int k = 0; k < 3; ++k) {
    out[k].basis = static_cast<Axis>(k);
    out[k].n_shots = n_shots;
    out[k].n_ions = crystal.size();
    out[k].seed = seed;
    out[k].epsilon = epsilon;
    out[k].outcomes.resize(n_shots * crystal.size());
  }
  for (std::size_t s = 0; s < n_shots; ++s) {
    // Box-Muller on the shot's own stream.
    auto eng = rng::make_engine(seed, rng::kPhaseJitter, s);
    const double u1 = 1.0 - rng::uniform01(eng);
    const double u2 = rng::uniform01(eng);
    DriveParams p = params;
    p.psi += psi_jitter * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    const BlochField field = prepare_texture(crystal, p, spec);
    for (int k = 0; k < 3; ++k) {
      const ShotRecord one = simulate_shots(field, static_cast<Axis>(k), 1, epsilon,
                                            rng::stream_seed(seed, rng::kShots, s, k));
      std::copy(one.outcomes.begin(), one.outcomes.end(),
                out[k].outcomes.begin() + static_cast<std::ptrdiff_t>(s * crystal.size()));
    }
  }
  return out;
}

BinnedAnalysis analyze_shots(const IonCrystal& crystal, const ShotTriple& shots,
                             const TargetFn& target, std::size_t n_radial,
                             std::size_t n_azimuthal, bool fit_phase, const BinOptions& options) {
  BinnedAnalysis out;
  const BinnedField raw = bin_polar(crystal, shots, n_radial, n_azimuthal, options);
  double offset = 0.0;
  if (fit_phase) offset = fit_phase_offset(reconstruct_bloch(raw, 0.0), crystal, target);
  out.phase_offset = offset;
  out.binned = reconstruct_bloch(raw, offset);

  const auto [sites, lab] = binned_sites(out.binned, Basis::lab);
  WindingOptions wo;
  wo.exclude_short = true;
  const WindingResult w = winding_details(sites, to_rotated_basis(lab), wo);
  DiagnosticsReport& r = out.report;
  r.Q = w.Q;
  r.triangle_count = w.triangle_count;
  r.hull_count = w.hull_count;
  r.site_count = w.site_count;
  r.excluded_sites = w.excluded;
  r.Q_oriented = w.excluded == 0 ? oriented_winding_number(sites, lab) : w.Q;
  r.order_parameter = order_parameter(sites, lab);
  r.mean_fidelity = binned_fidelity(out.binned, crystal, target, offset);
  return out;
}

DiagnosticsReport analyze_field(const IonCrystal& crystal, const BlochField& field,
                                const BlochField& target) {
  DiagnosticsReport r;
  const WindingResult w = winding_details(crystal, field);
  r.Q = w.Q;
  r.triangle_count = w.triangle_count;
  r.hull_count = w.hull_count;
  r.site_count = w.site_count;
  r.Q_oriented = oriented_winding_number(crystal, field);
  r.order_parameter = order_parameter(crystal, field);
  r.mean_fidelity = mean_fidelity(field, target).mean;
  return r;
}

}  // namespace spintex
