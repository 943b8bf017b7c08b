// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/protocols.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "spintex/errors.hpp"
#include "spintex/rng.hpp"

namespace spintex {

namespace {

constexpr std::array<std::pair<TextureKind, std::string_view>, 7> kKindNames{{
    {TextureKind::neel_skyrmion, "neel_skyrmion"},
    {TextureKind::bloch_skyrmion, "bloch_skyrmion"},
    {TextureKind::anti_skyrmion, "anti_skyrmion"},
    {TextureKind::bimeron, "bimeron"},
    {TextureKind::meron, "meron"},
    {TextureKind::skyrmionium, "skyrmionium"},
    {TextureKind::domain_wall, "domain_wall"},
}};

// The reset state after the closing -pi/2|y pulse.
Vec3 reset_orientation() { return rotate(Vec3::UnitZ(), PulseOp::y(-kPi / 2.0)); }

}  // namespace

std::string_view to_string(TextureKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

TextureKind texture_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw InvalidParameter("unknown texture kind '" + std::string(name) + "'");
}

TextureSpec TextureSpec::make(TextureKind kind, double helicity) {
  TextureSpec s;
  s.kind = kind;
  s.helicity = helicity;
  switch (kind) {
    case TextureKind::neel_skyrmion:
      s.drive_angle = kPi;
      break;
    case TextureKind::bloch_skyrmion:
      // Lab x is -Z' in the rotated frame, so R_x(a) turns the in-plane
      // spin by -a. The Neel texture here has helicity pi.
      s.drive_angle = kPi;
      s.post_pulses = {PulseOp::x(kPi - helicity)};
      break;
    case TextureKind::anti_skyrmion:
      s.drive_angle = kPi;
      s.post_pulses = {PulseOp::y(kPi)};
      break;
    case TextureKind::bimeron:
      s.drive_angle = kPi;
      s.post_pulses = {PulseOp::y(kPi / 2.0)};
      break;
    case TextureKind::meron:
      s.drive_angle = kPi / 2.0;
      break;
    case TextureKind::skyrmionium:
      s.drive_angle = 2.0 * kPi;
      break;
    case TextureKind::domain_wall:
      s.drive_angle = kPi / 10.0;
      break;
  }
  return s;
}

void TextureSpec::validate() const {
  if (!(drive_angle >= 0.0) || !std::isfinite(drive_angle))
    throw InvalidParameter("texture drive_angle must be finite and >= 0");
  for (const auto& p : post_pulses)
    if (!(p.axis.norm() > 0.0)) throw InvalidParameter("texture pulse axis has zero norm");
}

TargetFn texture_target(const TextureSpec& spec, double psi) {
  spec.validate();
  return [spec, psi](double r_norm, double phi) -> Vec3 {
    if (spec.kind == TextureKind::domain_wall && r_norm >= 0.5 - 1e-12)
      return reset_orientation();
    Vec3 v = closed_form_vector(r_norm, phi + psi, spec.drive_angle);
    for (const auto& p : spec.post_pulses) v = rotate(v, p);
    return v;
  };
}

BlochField target_texture(const IonCrystal& crystal, const TextureSpec& spec, double psi) {
  const auto fn = texture_target(spec, psi);
  std::vector<Vec3> out;
  out.reserve(crystal.size());
  for (std::size_t j = 0; j < crystal.size(); ++j)
    out.push_back(fn(crystal.normalized_radius(j), crystal[j].phi_rad));
  return BlochField(std::move(out), Basis::lab);
}

BlochField prepare_texture(const IonCrystal& crystal, const DriveParams& params,
                           const TextureSpec& spec, const PrepareOptions& options) {
  spec.validate();
  double t = 0.0;
  if (spec.drive_angle > 0.0) {
    if (!(std::abs(params.omega_R) > 0.0))
      throw InvalidParameter("omega_R is zero; the drive area cannot be reached");
    t = spec.drive_angle / std::abs(params.omega_R);
  }
  BlochField field =
      options.use_ode
          ? evolve_bloch_ode(crystal, params,
                             BlochField::uniform(crystal.size(), Vec3::UnitX()), t,
                             {.workers = options.workers})
          : evolve_closed_form(crystal, params, t);
  field = rotate_global(field, spec.post_pulses);

  if (spec.kind == TextureKind::domain_wall) {
    field = rotate_global(field, PulseOp::y(kPi / 2.0));
    field = apply_reset(field, ideal_reset_probabilities(crystal, crystal.radius() / 2.0),
                        RepumpMode::expectation, 0);
    field = rotate_global(field, PulseOp::y(-kPi / 2.0));
  }
  return field;
}

void BeamParams::validate() const {
  if (!(waist_um > 0.0)) throw InvalidParameter("beam.waist must be > 0");
  if (!(sweep_end_um >= 0.0)) throw InvalidParameter("beam.sweep_end must be >= 0");
  if (!(sweep_start_um > sweep_end_um))
    throw InvalidParameter("beam.sweep_start must exceed beam.sweep_end");
  if (!(step_um > 0.0)) throw InvalidParameter("beam.step must be > 0");
  if (!(dwell_s > 0.0)) throw InvalidParameter("beam.dwell must be > 0");
  if (!(rotation_period_s > 0.0)) throw InvalidParameter("beam.rotation_period must be > 0");
  if (!(peak_repump_rate >= 0.0)) throw InvalidParameter("beam.peak_repump_rate must be >= 0");
  if (samples_per_period < 8) throw InvalidParameter("beam.samples_per_period must be >= 8");
  if (!power_table.empty() && power_table.size() != positions().size())
    throw InvalidParameter("beam.power_table must have one entry per sweep position (" +
                           std::to_string(positions().size()) + ")");
  for (double m : power_table)
    if (!(m >= 0.0)) throw InvalidParameter("beam.power_table entries must be >= 0");
}

std::vector<double> BeamParams::positions() const {
  std::vector<double> out;
  const double span = sweep_start_um - sweep_end_um;
  const auto n = static_cast<std::size_t>(std::floor(span / step_um + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) out.push_back(sweep_start_um - step_um * k);
  if (sweep_end_um < out.back() - 1e-9 * step_um) out.push_back(sweep_end_um);
  return out;
}

double BeamParams::power_at(std::size_t index) const {
  return power_table.empty() ? 1.0 : power_table.at(index);
}

namespace {

// int_0^dwell exp(-2 d(t)^2 / w^2) dt for one beam position, trapezoid rule
// on the orbit (spectrally accurate over whole periods).
double orbit_overlap(double r, double phi0, double b, const BeamParams& beam) {
  const double w2 = beam.waist_um * beam.waist_um;
  if (std::abs(r - b) > 9.0 * beam.waist_um) return 0.0;
  const double omega = kTwoPi / beam.rotation_period_s;
  const double periods = beam.dwell_s / beam.rotation_period_s;
  const auto n = static_cast<std::size_t>(
      std::max(64.0, std::ceil(periods * beam.samples_per_period)));
  const double h = beam.dwell_s / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = h * static_cast<double>(i);
    const double d2 = r * r + b * b - 2.0 * r * b * std::cos(phi0 + omega * t - beam.beam_azimuth);
    const double g = std::exp(-2.0 * d2 / w2);
    sum += (i == 0 || i == n) ? 0.5 * g : g;
  }
  return sum * h;
}

}  // namespace

double calibrate_peak_rate(const BeamParams& beam, double p_target) {
  if (!(p_target > 0.0 && p_target < 1.0))
    throw InvalidParameter("calibration probability must lie in (0, 1)");
  BeamParams b = beam;
  b.power_table.clear();
  b.validate();
  const double overlap = orbit_overlap(b.sweep_end_um, 0.0, b.sweep_end_um, b);
  if (!(overlap > 0.0)) throw InvalidParameter("beam never overlaps the calibration ring");
  return -std::log1p(-p_target) / overlap;
}

double repump_exposure(double r_um, double phi_rad, const BeamParams& beam) {
  beam.validate();
  if (!(beam.peak_repump_rate > 0.0))
    throw InvalidParameter("repump exposure needs a resolved peak rate");
  const auto pos = beam.positions();
  const double omega = kTwoPi / beam.rotation_period_s;
  double e = 0.0;
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const double phase = phi_rad + omega * beam.dwell_s * static_cast<double>(k);
    e += beam.power_at(k) * orbit_overlap(r_um, phase, pos[k], beam);
  }
  return beam.peak_repump_rate * e;
}

std::vector<double> reset_probabilities(const IonCrystal& crystal, const BeamParams& beam) {
  BeamParams b = beam;
  if (!(b.peak_repump_rate > 0.0)) b.peak_repump_rate = calibrate_peak_rate(b);
  std::vector<double> p(crystal.size());
  for (std::size_t j = 0; j < crystal.size(); ++j)
    p[j] = -std::expm1(-repump_exposure(crystal[j].r_um, crystal[j].phi_rad, b));
  return p;
}

std::vector<double> ideal_reset_probabilities(const IonCrystal& crystal, double threshold_um) {
  std::vector<double> p(crystal.size());
  const double tol = 1e-12 * crystal.radius();
  for (std::size_t j = 0; j < crystal.size(); ++j)
    p[j] = crystal[j].r_um >= threshold_um - tol ? 1.0 : 0.0;
  return p;
}

BlochField apply_reset(const BlochField& field, const std::vector<double>& probabilities,
                       RepumpMode mode, std::uint64_t seed) {
  if (probabilities.size() != field.size())
    throw InvalidParameter("reset probabilities do not match the field length");
  const Vec3 up = field.basis() == Basis::lab ? Vec3::UnitZ() : to_rotated(Vec3::UnitZ());
  std::vector<Vec3> out(field.vectors());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double p = std::clamp(probabilities[j], 0.0, 1.0);
    if (mode == RepumpMode::expectation) {
      out[j] = p * up + (1.0 - p) * out[j];
    } else {
      auto eng = rng::make_engine(seed, rng::kRepump, j);
      if (rng::uniform01(eng) < p) out[j] = up;
    }
  }
  return BlochField(std::move(out), field.basis());
}

BlochField apply_repump_sweep(const IonCrystal& crystal, const BlochField& field,
                              const BeamParams& beam, std::uint64_t seed, RepumpMode mode) {
  if (field.size() != crystal.size())
    throw InvalidParameter("field length does not match the crystal");
  return apply_reset(field, reset_probabilities(crystal, beam), mode, seed);
}

BlochField prepare_domain_wall(const IonCrystal& crystal, const DriveParams& params,
                               const BeamParams& beam, std::uint64_t seed,
                               const DomainWallOptions& options) {
  TextureSpec spec = TextureSpec::make(TextureKind::neel_skyrmion);
  spec.drive_angle = options.drive_angle;
  BlochField field = prepare_texture(crystal, params, spec);
  field = rotate_global(field, PulseOp::y(kPi / 2.0));
  const auto probs = options.ideal_beam
                         ? ideal_reset_probabilities(crystal, crystal.radius() / 2.0)
                         : reset_probabilities(crystal, beam);
  field = apply_reset(field, probs, options.mode, seed);
  return rotate_global(field, PulseOp::y(-kPi / 2.0));
}

std::vector<SweepStep> sweep_schedule(const BeamParams& beam) {
  beam.validate();
  std::vector<SweepStep> out;
  const auto pos = beam.positions();
  for (std::size_t k = 0; k < pos.size(); ++k) out.push_back({pos[k], beam.dwell_s, beam.power_at(k)});
  return out;
}

std::vector<std::pair<double, double>> up_probability_profile(const IonCrystal& crystal,
                                                              const BlochField& field) {
  if (field.size() != crystal.size())
    throw InvalidParameter("field length does not match the crystal");
  std::vector<std::pair<double, double>> out;
  out.reserve(crystal.size());
  for (std::size_t j = 0; j < crystal.size(); ++j) {
    const Vec3 v = field.basis() == Basis::rotated ? field[j] : to_rotated(field[j]);
    out.emplace_back(crystal[j].r_um, 0.5 * (1.0 + v.z()));
  }
  return out;
}

}  // namespace spintex
