// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/noise.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "spintex/detail/least_squares.hpp"
#include "spintex/diagnostics.hpp"
#include "spintex/errors.hpp"
#include "spintex/rng.hpp"

namespace spintex {

void NoiseParams::validate() const {
  if (!(f_hz > 0.0)) throw InvalidParameter("noise.f must be > 0");
  if (!(gamma > 0.0)) throw InvalidParameter("noise.gamma must be > 0");
  if (!std::isfinite(B_nT) || !std::isfinite(t0_s))
    throw InvalidParameter("noise parameters must be finite");
}

double spin_echo_phase(const NoiseParams& noise, double T) {
  noise.validate();
  if (!(T >= 0.0)) throw InvalidParameter("echo time must be >= 0");
  const double w = kTwoPi * noise.f_hz;
  auto c = [&](double s) { return std::cos(w * (s - noise.t0_s)); };
  // int_a^b sin(w(t - t0)) dt = (c(a) - c(b)) / w
  return noise.gamma * noise.B_nT / w * (c(0.0) - 2.0 * c(T / 2.0) + c(T));
}

double spin_echo_phase_constant(double B0_nT, double gamma, double T) {
  if (!(T >= 0.0)) throw InvalidParameter("echo time must be >= 0");
  const double arm = B0_nT * (T / 2.0);
  return gamma * (arm - arm);
}

double echo_phase_amplitude(const NoiseParams& noise, double T) {
  noise.validate();
  const double w = kTwoPi * noise.f_hz;
  const double s = std::sin(w * T / 4.0);
  return std::abs(4.0 * noise.gamma * noise.B_nT / w * s * s);
}

double extract_phase(double sx, double sy) {
  if (sx == 0.0 && sy == 0.0) throw UndefinedPhase("transverse spin component is zero");
  double phi = std::atan2(sy, sx);
  if (phi <= -kPi) phi = kPi;
  return phi;
}

std::vector<EchoPoint> simulate_echo_decay(const IonCrystal& crystal, const BlochField& texture,
                                           const NoiseParams& noise, std::span<const double> T,
                                           T0Mode mode, std::size_t n_samples,
                                           std::uint64_t seed) {
  noise.validate();
  if (texture.size() != crystal.size())
    throw InvalidParameter("texture length does not match the crystal");
  if (mode == T0Mode::random_uniform && n_samples < 100)
    throw InvalidParameter("random t0 mode needs at least 100 samples");
  const BlochField lab = texture.basis() == Basis::lab ? texture : to_lab_basis(texture);
  const double psi0 = std::abs(order_parameter(crystal, lab));
  const double period = 1.0 / noise.f_hz;

  std::vector<EchoPoint> out;
  out.reserve(T.size());
  for (std::size_t k = 0; k < T.size(); ++k) {
    double mc = 0.0, ms = 0.0;
    if (mode == T0Mode::fixed) {
      const double phi = spin_echo_phase(noise, T[k]);
      mc = std::cos(phi);
      ms = std::sin(phi);
    } else {
      NoiseParams n = noise;
      for (std::size_t s = 0; s < n_samples; ++s) {
        auto eng = rng::make_engine(seed, rng::kEchoT0, s);
        n.t0_s = period * rng::uniform01(eng);
        const double phi = spin_echo_phase(n, T[k]);
        mc += std::cos(phi);
        ms += std::sin(phi);
      }
      mc /= static_cast<double>(n_samples);
      ms /= static_cast<double>(n_samples);
    }
    // Averaging R_x(phi) over samples is the linear map below.
    std::vector<Vec3> v;
    v.reserve(lab.size());
    for (const auto& u : lab.vectors())
      v.emplace_back(u.x(), mc * u.y() - ms * u.z(), ms * u.y() + mc * u.z());
    const double psi = std::abs(order_parameter(crystal, BlochField(std::move(v), Basis::lab)));
    out.push_back({T[k], psi, psi0 > 0.0 ? psi / psi0 : 0.0, mc, ms});
  }
  return out;
}

double echo_retention_closed_form(const NoiseParams& noise, double T) {
  return std::abs(std::cyl_bessel_j(0.0, echo_phase_amplitude(noise, T)));
}

double calibrate_amplitude(const NoiseParams& noise, double T, double target) {
  noise.validate();
  if (!(target > 0.0 && target < 1.0)) throw InvalidParameter("retention target must lie in (0, 1)");
  NoiseParams unit = noise;
  unit.B_nT = 1.0;
  const double per_nT = echo_phase_amplitude(unit, T);
  if (!(per_nT > 0.0)) throw InvalidParameter("echo is insensitive to the field at this T");
  // J0 decreases monotonically from 1 to 0 on [0, j0,1].
  double lo = 0.0, hi = 2.404825557695773;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::cyl_bessel_j(0.0, mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi) / per_nT;
}

NoiseFit fit_noise_model(std::span<const std::pair<double, double>> series, double gamma,
                         const NoiseFitOptions& options) {
  if (series.size() < 8) throw FitFailure("noise fit needs at least 8 points");
  if (!(gamma > 0.0)) throw InvalidParameter("gamma must be > 0");
  double tmax = 0.0, amax = 0.0;
  for (const auto& [T, phi] : series) {
    if (!std::isfinite(T) || !std::isfinite(phi)) throw FitFailure("non-finite point in echo series");
    tmax = std::max(tmax, T);
    amax = std::max(amax, std::abs(phi));
  }
  if (amax < 1e-12) throw FitFailure("echo phase is identically zero; B, f and t0 are unidentifiable");
  if (!(tmax > 0.0)) throw FitFailure("echo series spans no time");

  const double f_min = options.f_min_hz > 0.0 ? options.f_min_hz : 1.0 / tmax;
  const double f_max = options.f_max_hz;
  if (!(f_max > f_min) || !(options.f_step_hz > 0.0))
    throw InvalidParameter("noise fit frequency grid is empty");

  const auto m = static_cast<int>(series.size());
  auto basis = [&](double f, Eigen::MatrixXd& A) {
    const double w = kTwoPi * f;
    A.resize(m, 2);
    for (int i = 0; i < m; ++i) {
      const double T = series[static_cast<std::size_t>(i)].first;
      A(i, 0) = gamma / w * (1.0 - 2.0 * std::cos(w * T / 2.0) + std::cos(w * T));
      A(i, 1) = gamma / w * (-2.0 * std::sin(w * T / 2.0) + std::sin(w * T));
    }
  };
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) y[i] = series[static_cast<std::size_t>(i)].second;

  struct Candidate {
    double f, X, Y, rss;
  };
  std::vector<Candidate> scan;
  Eigen::MatrixXd A;
  for (double f = f_min; f <= f_max + 1e-12; f += options.f_step_hz) {
    basis(f, A);
    const Eigen::Vector2d xy = A.colPivHouseholderQr().solve(y);
    scan.push_back({f, xy[0], xy[1], (A * xy - y).squaredNorm()});
  }
  // Local minima of the profile, best first.
  std::vector<Candidate> starts;
  for (std::size_t k = 0; k < scan.size(); ++k) {
    const bool left = k == 0 || scan[k].rss <= scan[k - 1].rss;
    const bool right = k + 1 == scan.size() || scan[k].rss <= scan[k + 1].rss;
    if (left && right) starts.push_back(scan[k]);
  }
  std::sort(starts.begin(), starts.end(),
            [](const Candidate& a, const Candidate& b) { return a.rss < b.rss; });
  if (starts.size() > 6) starts.resize(6);

  detail::ResidualFn fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    const double w = kTwoPi * p[2];
    for (int i = 0; i < m; ++i) {
      const double T = series[static_cast<std::size_t>(i)].first;
      const double C = 1.0 - 2.0 * std::cos(w * T / 2.0) + std::cos(w * T);
      const double S = -2.0 * std::sin(w * T / 2.0) + std::sin(w * T);
      r[i] = gamma / w * (p[0] * C + p[1] * S) - y[i];
    }
  };

  detail::LsqResult best;
  best.rss = std::numeric_limits<double>::infinity();
  for (const auto& c : starts) {
    Eigen::VectorXd p0(3);
    p0 << c.X, c.Y, c.f;
    auto res = detail::levenberg_marquardt(fn, p0, m);
    if (res.rss < best.rss && res.params[2] > 0.0) best = res;
  }
  if (!std::isfinite(best.rss)) throw FitFailure("noise fit did not converge");

  const double f = best.params[2];
  const double w = kTwoPi * f;
  const double B = std::hypot(best.params[0], best.params[1]);
  if (!(B > 0.0)) throw FitFailure("noise fit collapsed to zero amplitude");
  double t0 = std::atan2(best.params[1], best.params[0]) / w;
  t0 = std::fmod(t0, 1.0 / f);
  if (t0 < 0.0) t0 += 1.0 / f;

  NoiseFit out;
  out.params = {B, f, t0, gamma};
  out.rss = best.rss;
  out.residual_norm = std::sqrt(best.rss);
  return out;
}

}  // namespace spintex
