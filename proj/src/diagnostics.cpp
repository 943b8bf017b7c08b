// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "spintex/delaunay.hpp"
#include "spintex/detail/least_squares.hpp"
#include "spintex/dynamics.hpp"
#include "spintex/errors.hpp"

namespace spintex {

double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double num = a.dot(b.cross(c));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

WindingResult winding_details(const IonCrystal& crystal, const BlochField& field,
                              const WindingOptions& options) {
  if (field.size() != crystal.size())
    throw InvalidParameter("field length does not match the crystal");

  WindingResult out;
  std::vector<Point2> points;
  std::vector<Vec3> spins;
  std::vector<std::size_t> site;
  for (std::size_t j = 0; j < crystal.size(); ++j) {
    const double n = field[j].norm();
    if (options.exclude_short && n < options.min_norm) {
      ++out.excluded;
      continue;
    }
    if (!(n > 1e-12))
      throw DegenerateSpin("zero Bloch vector at site " + std::to_string(j));
    points.emplace_back(crystal[j].x_um(), crystal[j].y_um());
    spins.push_back(field[j] / n);
    site.push_back(j);
  }
  out.site_count = points.size();

  const auto tri = delaunay_triangulate(
      points, {options.perturbation_fraction * crystal.spacing(), options.salt});
  out.hull_count = tri.hull.size();

  // The tie-break can turn collinear hull points into zero-area slivers.
  // Dropping them leaves the triangulation of the unperturbed points, and
  // each dropped sliver exposes one more hull vertex.
  const double min_area2 = 1e-9 * crystal.spacing() * crystal.spacing();
  double sum = 0.0;
  for (const auto& t : tri.triangles) {
    const Point2 e1 = points[t[1]] - points[t[0]], e2 = points[t[2]] - points[t[0]];
    if (std::abs(e1.x() * e2.y() - e1.y() * e2.x()) <= min_area2) {
      ++out.hull_count;
      continue;
    }
    ++out.triangle_count;
    const double omega = solid_angle(spins[t[0]], spins[t[1]], spins[t[2]]);
    sum += omega;
    if (options.keep_triangles) {
      out.triangles.push_back({site[t[0]], site[t[1]], site[t[2]]});
      out.solid_angles.push_back(omega);
    }
  }
  out.Q = sum / (4.0 * kPi);
  return out;
}

double winding_number(const IonCrystal& crystal, const BlochField& field) {
  return winding_details(crystal, field).Q;
}

double core_polarity(const IonCrystal& crystal, const BlochField& field) {
  if (field.size() != crystal.size() || crystal.size() == 0)
    throw InvalidParameter("field length does not match the crystal");
  double rmin = std::numeric_limits<double>::infinity();
  for (const auto& p : crystal.positions()) rmin = std::min(rmin, p.r_um);
  const double cut = rmin + 1e-6 * crystal.spacing();
  double sum = 0.0;
  int count = 0;
  for (std::size_t j = 0; j < crystal.size(); ++j) {
    if (crystal[j].r_um > cut) continue;
    const Vec3 v = field.basis() == Basis::rotated ? field[j] : to_rotated(field[j]);
    sum += v.z();
    ++count;
  }
  return sum / count;
}

double oriented_winding_number(const IonCrystal& crystal, const BlochField& field) {
  const double q = winding_number(crystal, field);
  const double core = core_polarity(crystal, field);
  if (std::abs(core) < 1e-6) return q;
  return core > 0.0 ? std::abs(q) : -std::abs(q);
}

double winding_continuum(double theta_edge) {
  if (!(theta_edge >= 0.0)) throw InvalidParameter("theta_edge must be >= 0");
  return -(1.0 - std::cos(theta_edge)) / 2.0;
}

std::complex<double> order_parameter(const IonCrystal& crystal, const BlochField& field) {
  if (field.size() != crystal.size())
    throw InvalidParameter("field length does not match the crystal");
  if (crystal.size() == 0) return {};
  std::complex<double> sum{};
  for (std::size_t j = 0; j < crystal.size(); ++j) {
    const Vec3 u = field.basis() == Basis::lab ? field[j] : to_lab(field[j]);
    sum += crystal.normalized_radius(j) * std::polar(1.0, crystal[j].phi_rad) *
           std::complex<double>(u.z(), -u.y());
  }
  return sum / static_cast<double>(crystal.size());
}

FidelityResult mean_fidelity(const BlochField& field, const BlochField& target) {
  if (field.size() != target.size())
    throw InvalidParameter("field and target lengths differ (" +
                           std::to_string(field.size()) + " vs " +
                           std::to_string(target.size()) + ")");
  FidelityResult out;
  if (field.size() == 0) return out;
  const bool same = field.basis() == target.basis();
  out.per_site.reserve(field.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j) {
    Vec3 v = target[j];
    if (!same) v = target.basis() == Basis::lab ? to_rotated(v) : to_lab(v);
    const double f = std::clamp(0.5 * (1.0 + field[j].dot(v)), 0.0, 1.0);
    out.per_site.push_back(f);
    sum += f;
  }
  out.mean = sum / static_cast<double>(field.size());
  return out;
}

namespace {

void require_fit(bool ok, const std::string& what) {
  if (!ok) throw FitFailure(what);
}

std::string residual_note(double rss, std::size_t n) {
  std::ostringstream s;
  s << " (rss " << rss << " over " << n << " points)";
  return s.str();
}

}  // namespace

RateFit fit_omega_r(std::span<const std::pair<double, double>> q_series) {
  require_fit(q_series.size() >= 4, "rate fit needs at least 4 time points");
  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
  double qmin = std::numeric_limits<double>::infinity(), qmax = -qmin;
  for (const auto& [t, q] : q_series) {
    require_fit(std::isfinite(t) && std::isfinite(q), "non-finite point in Q series");
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
    qmin = std::min(qmin, q);
    qmax = std::max(qmax, q);
  }
  require_fit(qmax - qmin > 1e-6, "Q series is constant; the rate is unidentifiable");
  require_fit(tmax > 0.0 && tmax > tmin, "Q series spans no time");

  const int m = static_cast<int>(q_series.size());
  detail::ResidualFn fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (int i = 0; i < m; ++i) {
      const auto& [t, q] = q_series[static_cast<std::size_t>(i)];
      r[i] = q + (1.0 - std::cos(p[0] * t)) / 2.0;
    }
  };

  RateFit best;
  best.rss = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 8; ++k) {
    Eigen::VectorXd p0(1);
    p0[0] = (0.5 * kPi * k) / tmax;
    const auto res = detail::levenberg_marquardt(fn, p0, m);
    if (res.rss < best.rss) best = {std::abs(res.params[0]), res.std_error[0], res.rss};
  }
  require_fit(std::isfinite(best.rss), "rate fit did not converge");
  require_fit(best.omega_R * (tmax - tmin) >= kPi * (1.0 - 1e-6),
              "Q series covers less than half an oscillation at the fitted rate" +
                  residual_note(best.rss, q_series.size()));
  return best;
}

RateFit fit_omega_r(const IonCrystal& crystal, std::span<const TimedField> series,
                    double psi) {
  require_fit(series.size() >= 4, "rate fit needs at least 4 time points");
  double tmax = 0.0, tmin = std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    if (s.field.size() != crystal.size())
      throw InvalidParameter("field length does not match the crystal");
    tmax = std::max(tmax, s.t);
    tmin = std::min(tmin, s.t);
  }
  require_fit(tmax > tmin, "trajectory series spans no time");

  const int m = static_cast<int>(series.size() * crystal.size() * 3);
  double spread = 0.0;
  for (const auto& s : series)
    for (std::size_t j = 0; j < crystal.size(); ++j)
      spread = std::max(spread, (s.field[j] - series.front().field[j]).norm());
  require_fit(spread > 1e-6, "trajectories are constant; the rate is unidentifiable");

  detail::ResidualFn fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    int k = 0;
    for (const auto& s : series) {
      for (std::size_t j = 0; j < crystal.size(); ++j) {
        const Vec3 u = s.field.basis() == Basis::lab ? s.field[j] : to_lab(s.field[j]);
        const Vec3 v = closed_form_vector(crystal.normalized_radius(j),
                                          crystal[j].phi_rad + psi, p[0] * s.t);
        r[k++] = u.x() - v.x();
        r[k++] = u.y() - v.y();
        r[k++] = u.z() - v.z();
      }
    }
  };
  RateFit best;
  best.rss = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 8; ++k) {
    Eigen::VectorXd p0(1);
    p0[0] = (0.5 * kPi * k) / tmax;
    const auto res = detail::levenberg_marquardt(fn, p0, m);
    if (res.rss < best.rss) best = {std::abs(res.params[0]), res.std_error[0], res.rss};
  }
  require_fit(std::isfinite(best.rss), "rate fit did not converge");
  return best;
}

EdgeFit fit_edge_width(std::span<const std::pair<double, double>> profile) {
  require_fit(profile.size() >= 5, "edge fit needs at least 5 radial points");
  std::vector<std::pair<double, double>> pts(profile.begin(), profile.end());
  std::sort(pts.begin(), pts.end());
  double pmin = 1.0, pmax = 0.0;
  for (const auto& [r, p] : pts) {
    require_fit(std::isfinite(r) && std::isfinite(p), "non-finite point in edge profile");
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
  }
  require_fit(pmax - pmin > 0.05, "profile does not straddle a transition");

  const double rlo = pts.front().first;
  const double rhi = pts.back().first;
  const double span = rhi - rlo;
  require_fit(span > 0.0, "profile spans no radius");

  const std::size_t q = std::max<std::size_t>(1, pts.size() / 5);
  double inner = 0.0, outer = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    inner += pts[i].second;
    outer += pts[pts.size() - 1 - i].second;
  }
  inner /= q;
  outer /= q;

  const int m = static_cast<int>(pts.size());
  detail::ResidualFn fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    const double sigma = std::max(std::abs(p[3]), 1e-12 * span);
    for (int i = 0; i < m; ++i) {
      const auto& [x, y] = pts[static_cast<std::size_t>(i)];
      const double model =
          p[0] + (p[1] - p[0]) * 0.5 * (1.0 + std::erf((x - p[2]) / (std::sqrt(2.0) * sigma)));
      r[i] = model - y;
    }
  };

  detail::LsqResult best;
  best.rss = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 8; ++k) {
    Eigen::VectorXd p0(4);
    p0 << inner, outer, rlo + span * (k + 0.5) / 8.0, span / 20.0;
    const auto res = detail::levenberg_marquardt(fn, p0, m);
    if (res.rss < best.rss) best = res;
  }
  require_fit(std::isfinite(best.rss), "edge fit did not converge");
  const double sigma = std::abs(best.params[3]);
  require_fit(std::isfinite(sigma), "edge fit produced a non-finite width");

  EdgeFit out;
  out.sigma = sigma;
  out.width_10_90 = kEdgeWidthPerSigma * sigma;
  out.std_error = kEdgeWidthPerSigma * best.std_error[3];
  out.r0 = best.params[2];
  out.p_inner = best.params[0];
  out.p_outer = best.params[1];
  out.rss = best.rss;
  return out;
}

}  // namespace spintex
