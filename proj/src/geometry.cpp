// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spintex/errors.hpp"
#include "spintex/rng.hpp"

namespace spintex {

double wrap_angle(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double IonPosition::x_um() const { return r_um * std::cos(phi_rad); }
double IonPosition::y_um() const { return r_um * std::sin(phi_rad); }

IonCrystal::IonCrystal(std::vector<IonPosition> positions, double radius_um,
                       double spacing_um)
    : positions_(std::move(positions)), radius_(radius_um), spacing_(spacing_um) {
  if (!(radius_ > 0.0)) throw InvalidParameter("crystal radius must be > 0");
  if (!(spacing_ > 0.0)) throw InvalidParameter("crystal spacing must be > 0");
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    auto& p = positions_[i];
    if (!(p.r_um >= 0.0) || !std::isfinite(p.phi_rad))
      throw InvalidParameter("ion " + std::to_string(i) + " has an invalid position");
    if (p.r_um > radius_ * (1.0 + 1e-12))
      throw InvalidParameter("ion " + std::to_string(i) + " lies outside the crystal radius");
    p.phi_rad = wrap_angle(p.phi_rad);
  }
}

IonCrystal IonCrystal::rotated(double delta) const {
  auto moved = positions_;
  for (auto& p : moved) p.phi_rad = wrap_angle(p.phi_rad + delta);
  return IonCrystal(std::move(moved), radius_, spacing_);
}

namespace {

struct Site {
  double x;
  double y;
  double r;
  double phi;
};

std::vector<Site> lattice_sites(double a, double radius) {
  const double h = a * std::sqrt(3.0) / 2.0;
  const int jmax = static_cast<int>(std::ceil(radius / h)) + 1;
  const int imax = static_cast<int>(std::ceil(radius / a)) + jmax + 1;
  const double limit = radius * (1.0 + 1e-12) + 1e-12 * a;
  std::vector<Site> sites;
  for (int j = -jmax; j <= jmax; ++j) {
    for (int i = -imax; i <= imax; ++i) {
      const double x = a * (i + 0.5 * j);
      const double y = h * j;
      // Radius from the integer shell norm, so every site of a shell gets
      // the same value and a shell is admitted as a whole.
      const double r = a * std::sqrt(static_cast<double>(i * i + i * j + j * j));
      if (r <= limit) sites.push_back({x, y, r, r > 0.0 ? wrap_angle(std::atan2(y, x)) : 0.0});
    }
  }
  // Shells first, then azimuth. Radii within a shell agree to rounding, so
  // compare them on a tolerance before falling back to the angle.
  const double tol = 1e-9 * a;
  std::sort(sites.begin(), sites.end(), [tol](const Site& p, const Site& q) {
    if (std::abs(p.r - q.r) > tol) return p.r < q.r;
    return p.phi < q.phi;
  });
  return sites;
}

void require_positive(double spacing, double radius) {
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw InvalidParameter("spacing must be a positive finite length");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InvalidParameter("radius must be a positive finite length");
}

}  // namespace

std::size_t lattice_site_count(double spacing_um, double radius_um) {
  require_positive(spacing_um, radius_um);
  return lattice_sites(spacing_um, radius_um).size();
}

IonCrystal generate_crystal(double spacing_um, double radius_um) {
  return generate_crystal(CrystalOptions{spacing_um, radius_um, 0.0, 0});
}

IonCrystal generate_crystal(const CrystalOptions& options) {
  require_positive(options.spacing_um, options.radius_um);
  if (options.jitter_um < 0.0) throw InvalidParameter("jitter must be >= 0");

  const auto sites = lattice_sites(options.spacing_um, options.radius_um);
  std::vector<IonPosition> positions;
  positions.reserve(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (options.jitter_um == 0.0) {
      positions.push_back({sites[i].r, sites[i].phi});
      continue;
    }
    double x = sites[i].x;
    double y = sites[i].y;
    {
      auto eng = rng::make_engine(options.seed, rng::kJitter, i);
      const double rho = options.jitter_um * std::sqrt(rng::uniform01(eng));
      const double ang = kTwoPi * rng::uniform01(eng);
      x += rho * std::cos(ang);
      y += rho * std::sin(ang);
    }
    const double r = std::hypot(x, y);
    positions.push_back({r, r > 0.0 ? std::atan2(y, x) : 0.0});
  }

  double rmax = 0.0;
  for (const auto& p : positions) rmax = std::max(rmax, p.r_um);
  const double radius = rmax > 0.0 ? rmax : options.radius_um;
  return IonCrystal(std::move(positions), radius, options.spacing_um);
}

double spacing_for_ion_count(std::size_t target_count, double radius_um) {
  if (target_count == 0) throw InvalidParameter("target ion count must be >= 1");
  require_positive(1.0, radius_um);
  if (target_count == 1) return 2.0 * radius_um;
  // Site count is non-increasing in spacing: shrink [lo, hi] until it
  // brackets the target.
  double lo = radius_um / std::sqrt(static_cast<double>(target_count)) / 4.0;
  double hi = 2.0 * radius_um;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lattice_site_count(mid, radius_um) >= target_count)
      lo = mid;
    else
      hi = mid;
  }
  const auto n_lo = lattice_site_count(lo, radius_um);
  const auto n_hi = lattice_site_count(hi, radius_um);
  const auto d_lo = n_lo > target_count ? n_lo - target_count : target_count - n_lo;
  const auto d_hi = n_hi > target_count ? n_hi - target_count : target_count - n_hi;
  return d_lo <= d_hi ? lo : hi;
}

}  // namespace spintex
