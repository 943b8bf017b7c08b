// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/dynamics.hpp"

#include <Eigen/Geometry>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "spintex/errors.hpp"
#include "spintex/parallel.hpp"

namespace spintex {

namespace {

bool close_rel(double a, double b, double tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * scale;
}

double deg2rad(double deg) { return deg * kPi / 180.0; }

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw InvalidParameter("evolution time must be finite and >= 0");
}

}  // namespace

DriveParams DriveParams::resonant(double omega_R, double eta_x, double R_um,
                                  double omega_mw, double omega_rot, double psi,
                                  double delta_theta_deg, double theta_odf_deg) {
  if (!(R_um > 0.0)) throw InvalidParameter("drive radius R must be > 0");
  if (!(eta_x > 0.0)) throw InvalidParameter("eta_x must be > 0");
  DriveParams p;
  p.omega_R = omega_R;
  p.eta_x = eta_x;
  p.delta_ac = 2.0 * omega_R / eta_x;
  p.psi = psi;
  p.omega_mw = omega_mw;
  p.omega_rot = omega_rot;
  p.mu_r = omega_mw + omega_rot;
  p.R_um = R_um;
  p.dk_x = eta_x / R_um;
  p.delta_theta_deg = delta_theta_deg;
  p.theta_odf_deg = theta_odf_deg;
  const double s = std::sin(deg2rad(delta_theta_deg));
  p.dk_z = s != 0.0 ? p.dk_x / s * std::cos(deg2rad(delta_theta_deg)) : 0.0;
  return p;
}

DriveParams DriveParams::experiment(double omega_mw_hz) {
  return resonant(angular(1.56e3), 0.66, 150.0, angular(omega_mw_hz), angular(78e3));
}

void DriveParams::validate() const {
  if (!(R_um > 0.0)) throw InvalidParameter("drive.R must be > 0");
  if (!close_rel(omega_R, delta_ac * eta_x / 2.0, 1e-9))
    throw InvalidParameter("drive: Omega_R must equal delta_ac * eta_x / 2");
  if (!close_rel(eta_x, dk_x * R_um, 1e-9))
    throw InvalidParameter("drive: eta_x must equal dk_x * R");
  for (double v : {omega_R, delta_ac, eta_x, psi, omega_mw, omega_rot, mu_r, dk_x, dk_z})
    if (!std::isfinite(v)) throw InvalidParameter("drive: non-finite parameter");
}

bool DriveParams::is_resonant(double rel_tol) const {
  return close_rel(mu_r, omega_mw + omega_rot, rel_tol);
}

DriveParams DriveParams::with_eta_scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidParameter("eta scale factor must be > 0");
  DriveParams p = *this;
  p.eta_x *= factor;
  p.dk_x *= factor;
  p.dk_z *= factor;
  p.omega_R = p.delta_ac * p.eta_x / 2.0;
  return p;
}

Vec3 closed_form_vector(double r_norm, double chi, double drive_angle) {
  const double a = r_norm * drive_angle;
  const double s = std::sin(a);
  return {std::cos(a), s * std::cos(chi), -s * std::sin(chi)};
}

BlochField evolve_closed_form(const IonCrystal& crystal, const DriveParams& params,
                              double t) {
  require_time(t);
  const double angle = params.omega_R * t;
  std::vector<Vec3> out;
  out.reserve(crystal.size());
  for (std::size_t j = 0; j < crystal.size(); ++j)
    out.push_back(closed_form_vector(crystal.normalized_radius(j),
                                     crystal[j].phi_rad + params.psi, angle));
  return BlochField(std::move(out), Basis::lab);
}

BlochField evolve_bloch_ode(const IonCrystal& crystal, const DriveParams& params,
                            const BlochField& initial, double t,
                            const OdeOptions& options) {
  require_time(t);
  if (initial.size() != crystal.size())
    throw InvalidParameter("initial field length does not match the crystal");
  if (t == 0.0) return initial;

  using State = std::array<double, 3>;
  namespace ode = boost::numeric::odeint;

  std::vector<Vec3> out(crystal.size());
  std::vector<double> drift(crystal.size(), 0.0);

  parallel_for(crystal.size(), options.workers, [&](std::size_t j) {
    const double rate = params.omega_R * crystal.normalized_radius(j);
    const double chi = crystal[j].phi_rad + params.psi;
    const double c = rate * std::cos(chi);
    const double s = rate * std::sin(chi);
    const Vec3& v0 = initial[j];
    if (rate == 0.0) {
      out[j] = v0;
      return;
    }
    State x{v0.x(), v0.y(), v0.z()};
    // dv/dt = M v with M = rate [[0, -cos, sin], [cos, 0, 0], [-sin, 0, 0]].
    auto rhs = [c, s](const State& v, State& dv, double) {
      dv[0] = -c * v[1] + s * v[2];
      dv[1] = c * v[0];
      dv[2] = -s * v[0];
    };
    auto stepper = ode::make_controlled(options.abs_tol, options.rel_tol,
                                        ode::runge_kutta_dopri5<State>());
    const double dt0 = std::min(t, 0.01 / rate);
    try {
      ode::integrate_adaptive(stepper, rhs, x, 0.0, t, dt0);
    } catch (const std::exception& e) {
      throw NumericalFailure("Bloch ODE integration failed at ion " +
                             std::to_string(j) + ": " + e.what());
    }
    out[j] = Vec3(x[0], x[1], x[2]);
    drift[j] = std::abs(out[j].norm() - v0.norm());
  });

  std::size_t worst = 0;
  for (std::size_t j = 1; j < drift.size(); ++j)
    if (drift[j] > drift[worst]) worst = j;
  if (!drift.empty() && drift[worst] > options.norm_tol) {
    std::ostringstream msg;
    msg << "Bloch ODE norm drift " << drift[worst] << " exceeds " << options.norm_tol
        << " (worst ion " << worst << ")";
    throw NumericalFailure(msg.str());
  }
  // Clamp rounding above unit norm so the field invariant holds.
  for (std::size_t j = 0; j < out.size(); ++j)
    if (out[j].norm() > 1.0) out[j].normalize();
  return BlochField(std::move(out), initial.basis());
}

namespace {

// Field vector b(t) of the dressed-frame drive, du/dt = b x u.
// H = f(t) (cos(Omega t) sz + sin(Omega t) sy), so b = 2 f (0, sin, cos).
struct DressedDrive {
  double delta_ac, eta_r, phi, psi, omega_rot, mu_r, omega_mw;

  Vec3 operator()(double t) const {
    const double arg = eta_r * std::cos(omega_rot * t + phi) - mu_r * t + psi;
    const double f2 = 2.0 * delta_ac * std::sin(arg);
    return {0.0, f2 * std::sin(omega_mw * t), f2 * std::cos(omega_mw * t)};
  }
};

Vec3 integrate_drive(const DressedDrive& drive, double t, std::size_t steps) {
  // Fourth-order Magnus with two Gauss-Legendre nodes. For u' = [b x] u the
  // commutator [A1, A2] is [(b1 x b2) x], so each step is a rotation about
  //   w = h/2 (b1 + b2) - sqrt(3) h^2 / 12 (b1 x b2).
  const double h = t / static_cast<double>(steps);
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
  const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const double k = std::sqrt(3.0) * h * h / 12.0;
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  for (std::size_t n = 0; n < steps; ++n) {
    const double t0 = h * static_cast<double>(n);
    const Vec3 b1 = drive(t0 + c1 * h);
    const Vec3 b2 = drive(t0 + c2 * h);
    const Vec3 w = 0.5 * h * (b1 + b2) - k * b1.cross(b2);
    const double angle = w.norm();
    if (angle > 0.0) q = Eigen::Quaterniond(Eigen::AngleAxisd(angle, w / angle)) * q;
    if ((n & 1023u) == 1023u) q.normalize();
  }
  q.normalize();
  return q * Vec3::UnitX();
}

}  // namespace

std::size_t default_substeps(const DriveParams& params, double t) {
  const double eta_harmonics = std::ceil(3.0 * std::abs(params.eta_x)) + 2.0;
  const double fastest = std::abs(params.mu_r) + std::abs(params.omega_mw) +
                         eta_harmonics * std::abs(params.omega_rot) +
                         2.0 * std::abs(params.delta_ac);
  const double cycles = fastest * t / kTwoPi;
  return std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(40.0 * cycles)));
}

BlochField evolve_full_drive(const IonCrystal& crystal, const DriveParams& params,
                             double t, std::size_t substeps,
                             const FullDriveOptions& options) {
  require_time(t);
  if (substeps == 0) throw InvalidParameter("substeps must be >= 1");
  if (t == 0.0) return BlochField::uniform(crystal.size(), Vec3::UnitX());

  std::vector<Vec3> coarse(crystal.size());
  std::vector<Vec3> fine(crystal.size());
  parallel_for(crystal.size(), options.workers, [&](std::size_t j) {
    const DressedDrive drive{params.delta_ac,
                             params.eta_x * crystal.normalized_radius(j),
                             crystal[j].phi_rad,
                             params.psi,
                             params.omega_rot,
                             params.mu_r,
                             params.omega_mw};
    coarse[j] = integrate_drive(drive, t, substeps);
    fine[j] = integrate_drive(drive, t, 2 * substeps);
  });

  double worst = 0.0;
  std::size_t worst_ion = 0;
  for (std::size_t j = 0; j < crystal.size(); ++j) {
    const double d = (coarse[j] - fine[j]).cwiseAbs().maxCoeff();
    if (d > worst) {
      worst = d;
      worst_ion = j;
    }
  }
  if (worst > options.convergence_tol) {
    std::ostringstream msg;
    msg << "full-drive integration not converged with " << substeps
        << " substeps: step halving moved ion " << worst_ion << " by " << worst;
    throw NumericalFailure(msg.str());
  }
  for (auto& v : fine) v.normalize();
  return BlochField(std::move(fine), Basis::lab);
}

double mean_infidelity(const BlochField& a, const BlochField& b) {
  if (a.size() != b.size()) throw InvalidParameter("field lengths differ");
  if (a.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += 0.5 * (1.0 - a[j].dot(b[j]));
  return sum / static_cast<double>(a.size());
}

RwaReport check_rwa(const DriveParams& params, double threshold) {
  RwaReport r;
  r.threshold = threshold;
  const double b_rot = std::abs(2.0 * params.omega_rot);
  const double b_mw = std::abs(2.0 * params.omega_mw);
  const double b_sum = std::abs(2.0 * (params.omega_rot + params.omega_mw));
  r.min_bound = std::min({b_rot, b_mw, b_sum});
  const double rate = std::abs(params.omega_R);
  auto ratio = [rate](double bound) {
    if (rate == 0.0) return 0.0;
    return bound > 0.0 ? rate / bound : std::numeric_limits<double>::infinity();
  };
  r.ratio_2omega_rot = ratio(b_rot);
  r.ratio_2omega_mw = ratio(b_mw);
  r.ratio_2sum = ratio(b_sum);
  r.ratio = ratio(r.min_bound);
  r.pass = r.ratio < threshold;
  return r;
}

}  // namespace spintex
