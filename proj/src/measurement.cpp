// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spintex/errors.hpp"
#include "spintex/parallel.hpp"
#include "spintex/rng.hpp"

namespace spintex {

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::x:
      return "x";
    case Axis::y:
      return "y";
    case Axis::z:
      return "z";
  }
  return "?";
}

Axis axis_from_string(std::string_view name) {
  if (name == "x") return Axis::x;
  if (name == "y") return Axis::y;
  if (name == "z") return Axis::z;
  throw InvalidParameter("unknown measurement basis '" + std::string(name) + "'");
}

double ShotRecord::ion_mean(std::size_t ion) const {
  std::size_t sum = 0;
  for (std::size_t s = 0; s < n_shots; ++s) sum += at(s, ion);
  return n_shots ? static_cast<double>(sum) / static_cast<double>(n_shots) : 0.0;
}

void ShotRecord::validate() const {
  if (outcomes.size() != n_shots * n_ions)
    throw InvalidParameter("shot record dimensions do not match its outcome count");
  if (!(epsilon >= 0.0 && epsilon < 0.5))
    throw InvalidParameter("misclassification rate must lie in [0, 0.5)");
  for (auto b : outcomes)
    if (b > 1) throw InvalidParameter("shot outcomes must be 0 or 1");
}

ShotRecord simulate_shots(const BlochField& field, Axis basis, std::size_t n_shots,
                          double epsilon, std::uint64_t seed, unsigned workers) {
  if (n_shots < 1) throw InvalidParameter("n_shots must be >= 1");
  if (!(epsilon >= 0.0 && epsilon < 0.5))
    throw InvalidParameter("misclassification rate must lie in [0, 0.5)");
  ShotRecord rec;
  rec.basis = basis;
  rec.n_shots = n_shots;
  rec.n_ions = field.size();
  rec.seed = seed;
  rec.epsilon = epsilon;
  rec.outcomes.assign(n_shots * field.size(), 0);
  const int axis = static_cast<int>(basis);
  parallel_for(field.size(), workers, [&](std::size_t j) {
    const double p = std::clamp(0.5 * (1.0 + field[j][axis]), 0.0, 1.0);
    const double bright = p * (1.0 - epsilon) + (1.0 - p) * epsilon;
    auto eng = rng::make_engine(seed, rng::kShots, static_cast<std::uint64_t>(axis), j);
    for (std::size_t s = 0; s < n_shots; ++s)
      rec.outcomes[s * rec.n_ions + j] = rng::uniform01(eng) < bright ? 1 : 0;
  });
  return rec;
}

std::size_t BinnedField::non_empty() const {
  return static_cast<std::size_t>(
      std::count_if(bins.begin(), bins.end(), [](const Bin& b) { return !b.empty(); }));
}

std::size_t bin_index(double r_norm, double phi, std::size_t n_radial, std::size_t n_azimuthal) {
  const auto ir = std::min(n_radial - 1,
                           static_cast<std::size_t>(std::max(0.0, r_norm) * n_radial));
  const auto ia = std::min(n_azimuthal - 1,
                           static_cast<std::size_t>(wrap_angle(phi) / kTwoPi * n_azimuthal));
  return ir * n_azimuthal + ia;
}

BinnedField bin_polar(const IonCrystal& crystal, std::span<const ShotRecord> records,
                      std::size_t n_radial, std::size_t n_azimuthal, const BinOptions& options) {
  if (n_radial == 0 || n_azimuthal == 0)
    throw InvalidParameter("bin grid needs at least one radial and one azimuthal division");
  std::array<const ShotRecord*, 3> by_axis{};
  for (const auto& r : records) {
    r.validate();
    if (r.n_ions != crystal.size())
      throw InvalidParameter("shot record ion count does not match the crystal");
    auto& slot = by_axis[static_cast<int>(r.basis)];
    if (slot) throw InvalidParameter("duplicate shot record for basis " + std::string(to_string(r.basis)));
    slot = &r;
  }

  BinnedField out;
  out.n_radial = n_radial;
  out.n_azimuthal = n_azimuthal;
  out.radius_um = crystal.radius();
  out.bins.resize(n_radial * n_azimuthal);
  for (std::size_t ir = 0; ir < n_radial; ++ir) {
    for (std::size_t ia = 0; ia < n_azimuthal; ++ia) {
      auto& b = out.bins[ir * n_azimuthal + ia];
      b.r_center = (ir + 0.5) * crystal.radius() / n_radial;
      b.phi_center = (ia + 0.5) * kTwoPi / n_azimuthal;
    }
  }
  for (std::size_t j = 0; j < crystal.size(); ++j) {
    auto& b = out.bins[bin_index(crystal.normalized_radius(j), crystal[j].phi_rad, n_radial,
                                 n_azimuthal)];
    b.ions.push_back(j);
    ++b.n_ions;
  }

  std::array<std::vector<std::size_t>, 3> ones;
  for (int a = 0; a < 3; ++a) {
    const ShotRecord* rec = by_axis[a];
    if (!rec) continue;
    auto& count = ones[a];
    std::vector<std::size_t> total(out.bins.size(), 0);
    count.assign(out.bins.size(), 0);
    if (!options.randomize_orientation) {
      for (std::size_t k = 0; k < out.bins.size(); ++k) {
        for (std::size_t j : out.bins[k].ions) {
          for (std::size_t s = 0; s < rec->n_shots; ++s) count[k] += rec->at(s, j);
          total[k] += rec->n_shots;
        }
      }
    } else {
      for (std::size_t s = 0; s < rec->n_shots; ++s) {
        auto eng = rng::make_engine(options.orientation_seed, rng::kOrientation,
                                    static_cast<std::uint64_t>(a), s);
        const double delta = kTwoPi * rng::uniform01(eng);
        for (std::size_t j = 0; j < crystal.size(); ++j) {
          const auto k = bin_index(crystal.normalized_radius(j), crystal[j].phi_rad + delta,
                                   n_radial, n_azimuthal);
          count[k] += rec->at(s, j);
          ++total[k];
        }
      }
    }
    for (std::size_t k = 0; k < out.bins.size(); ++k) {
      auto& b = out.bins[k];
      b.samples[a] = total[k];
      b.has_basis[a] = total[k] > 0;
      b.p_up[a] = total[k] ? static_cast<double>(count[k]) / static_cast<double>(total[k]) : 0.0;
    }
  }
  return out;
}

BinnedField reconstruct_bloch(const BinnedField& binned, double phase_offset) {
  BinnedField out = binned;
  out.phase_offset = binned.phase_offset + phase_offset;
  for (auto& b : out.bins) {
    b.phi_center = wrap_angle(b.phi_center + phase_offset);
    if (b.empty()) continue;
    for (int a = 0; a < 3; ++a)
      if (!b.has_basis[a])
        throw IncompleteData("missing " + std::string(to_string(static_cast<Axis>(a))) +
                             "-basis data for reconstruction");
    b.u = Vec3(2.0 * b.p_up[0] - 1.0, 2.0 * b.p_up[1] - 1.0, 2.0 * b.p_up[2] - 1.0);
    if (b.u.norm() > 1.0) b.u.normalize();
    b.reconstructed = true;
  }
  return out;
}

std::pair<IonCrystal, BlochField> binned_sites(const BinnedField& binned, Basis basis) {
  std::vector<IonPosition> pos;
  std::vector<Vec3> vec;
  for (const auto& b : binned.bins) {
    if (b.empty()) continue;
    if (!b.reconstructed) throw IncompleteData("bin has not been reconstructed");
    pos.push_back({b.r_center, b.phi_center});
    vec.push_back(basis == Basis::lab ? b.u : to_rotated(b.u));
  }
  const double spacing = binned.radius_um / static_cast<double>(binned.n_radial);
  return {IonCrystal(std::move(pos), binned.radius_um, spacing),
          BlochField(std::move(vec), basis)};
}

BlochField binned_target(const BinnedField& binned, const IonCrystal& crystal,
                         const TargetFn& target, double phase_offset) {
  std::vector<Vec3> out;
  for (const auto& b : binned.bins) {
    if (b.empty()) continue;
    Vec3 sum = Vec3::Zero();
    for (std::size_t j : b.ions) {
      if (j >= crystal.size()) throw InvalidParameter("bin refers to an ion outside the crystal");
      sum += target(crystal.normalized_radius(j), crystal[j].phi_rad + phase_offset);
    }
    const double n = sum.norm();
    out.push_back(n > 0.0 ? Vec3(sum / n) : Vec3::UnitZ());
  }
  return BlochField(std::move(out), Basis::lab);
}

double binned_fidelity(const BinnedField& binned, const IonCrystal& crystal,
                       const TargetFn& target, double phase_offset) {
  const auto tgt = binned_target(binned, crystal, target, phase_offset);
  double sum = 0.0;
  std::size_t k = 0;
  for (const auto& b : binned.bins) {
    if (b.empty()) continue;
    if (!b.reconstructed) throw IncompleteData("bin has not been reconstructed");
    sum += 0.5 * (1.0 + b.u.dot(tgt[k]));
    ++k;
  }
  return k ? sum / static_cast<double>(k) : 0.0;
}

double fit_phase_offset(const BinnedField& binned, const IonCrystal& crystal,
                        const TargetFn& target) {
  auto score = [&](double d) { return binned_fidelity(binned, crystal, target, d); };
  constexpr int kGrid = 720;
  double best_d = 0.0;
  double best = -1.0;
  double worst = 2.0;
  for (int k = 0; k < kGrid; ++k) {
    const double d = -kPi + kTwoPi * (k + 1) / kGrid;
    const double f = score(d);
    if (f > best) {
      best = f;
      best_d = d;
    }
    worst = std::min(worst, f);
  }
  if (best - worst < 1e-9)
    throw NoUniquePhase("fidelity is independent of the azimuthal offset");

  const double step = kTwoPi / kGrid;
  double a = best_d - step, b = best_d + step;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = score(c), fd = score(d);
  for (int it = 0; it < 60; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = score(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = score(d);
    }
  }
  double x = 0.5 * (a + b);
  if (score(x) < best) x = best_d;
  x = std::remainder(x, kTwoPi);
  if (x <= -kPi) x += kTwoPi;
  return x;
}

}  // namespace spintex
