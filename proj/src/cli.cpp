// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "spintex/config.hpp"
#include "spintex/diagnostics.hpp"
#include "spintex/errors.hpp"
#include "spintex/io.hpp"
#include "spintex/noise.hpp"
#include "spintex/pipeline.hpp"
#include "spintex/render.hpp"
#include "spintex/rng.hpp"

namespace spintex::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> formats;
  unsigned workers = 0;
};

/// Output directory plus the format filter.
class Sink {
 public:
  Sink(fs::path dir, const ExperimentConfig& cfg) : dir_(std::move(dir)), cfg_(cfg) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  const fs::path& dir() const { return dir_; }
  Sink sub(const std::string& name) const { return Sink(dir_ / name, cfg_); }

  void text(const std::string& name, const std::string& body) {
    const auto ext = fs::path(name).extension().string();
    const std::string fmt = ext.empty() ? "" : ext.substr(1);
    if (!fmt.empty() && !cfg_.wants(fmt)) return;
    io::write_text(dir_ / name, body);
    written_.push_back(name);
  }

  template <class F>
  void csv(const std::string& name, F&& fill) {
    if (!cfg_.wants("csv")) return;
    std::ostringstream os;
    fill(os);
    text(name, os.str());
  }

  void json_doc(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  const ExperimentConfig& cfg_;
  std::vector<std::string> written_;
};

json rate_json(const RateFit& f) {
  return {{"omega_R_rad_s", f.omega_R},
          {"omega_R_hz", f.omega_R / kTwoPi},
          {"std_error_rad_s", f.std_error},
          {"std_error_hz", f.std_error / kTwoPi},
          {"rss", f.rss}};
}

json report_tree(const DiagnosticsReport& r) { return json::parse(io::report_to_json(r)); }

ExperimentConfig load_config(const Globals& g) {
  ExperimentConfig cfg;
  if (!g.config_path.empty()) {
    std::string text;
    try {
      text = io::read_text(g.config_path);
    } catch (const IoError& e) {
      throw ConfigError(std::string(e.what()));
    }
    try {
      cfg = config_from_json(text);
    } catch (const ConfigError& e) {
      throw ConfigError(g.config_path + ": " + e.what());
    }
  }
  if (!g.overrides.empty()) cfg = apply_overrides(cfg, g.overrides);
  if (g.seed) set_master_seed(cfg, *g.seed);
  if (!g.out_dir.empty()) cfg.output.directory = g.out_dir;
  if (!g.formats.empty()) {
    cfg.output.formats = g.formats;
    cfg.validate();
  }
  if (g.workers > 0) cfg.workers = g.workers;
  return cfg;
}

void emit_config(Sink& sink, const ExperimentConfig& cfg) {
  // The resolved config is always written so every run is reproducible.
  io::write_text(sink.dir() / "config.resolved.json", config_to_json(cfg));
}

BlochField prepare(const ExperimentConfig& cfg, const IonCrystal& crystal, const DriveParams& p,
                   const TextureSpec& spec) {
  PrepareOptions opt;
  opt.use_ode = cfg.drive.use_ode;
  opt.workers = cfg.workers;
  return prepare_texture(crystal, p, spec, opt);
}

void write_field(Sink& sink, const std::string& name, const BlochField& f) {
  sink.csv(name, [&](std::ostream& os) { io::write_field_csv(os, f); });
}

void write_svg(Sink& sink, const std::string& name, const IonCrystal& c, const BlochField& f,
               render::Style s, const std::string& title) {
  sink.text(name, render::field_svg(c, f, s, title));
}

std::vector<io::BinnedRow> binned_rows(const BinnedField& b, bool rotated) {
  std::ostringstream os;
  io::write_binned_csv(os, b);
  std::istringstream is(os.str());
  auto rows = io::read_binned_csv(is);
  if (rotated)
    for (auto& r : rows)
      if (std::isfinite(r.u.x())) r.u = to_rotated(r.u);
  return rows;
}

void write_binned_views(Sink& sink, const BinnedField& b, const std::string& stem) {
  const auto rows = binned_rows(b, true);
  sink.text(stem + "_X.svg",
            render::binned_svg(rows, b.radius_um, render::Style::heatmap_x, "X' projection"));
  sink.text(stem + "_Y.svg",
            render::binned_svg(rows, b.radius_um, render::Style::heatmap_y, "Y' projection"));
  sink.text(stem + "_Z.svg",
            render::binned_svg(rows, b.radius_um, render::Style::heatmap_z, "Z' projection"));
}

ShotTriple shots_for(const ExperimentConfig& cfg, const IonCrystal& crystal, const DriveParams& p,
                     const TextureSpec& spec) {
  const auto& m = cfg.measurement;
  return measure_texture(crystal, p, spec, m.n_shots, m.epsilon, m.phase_jitter_rad, m.seed,
                         cfg.workers);
}

BinOptions bin_options(const ExperimentConfig& cfg) {
  BinOptions o;
  o.randomize_orientation = cfg.measurement.randomize_orientation;
  o.orientation_seed = rng::stream_seed(cfg.measurement.seed, rng::kOrientation);
  return o;
}

void write_shots(Sink& sink, const ExperimentConfig& cfg, const ShotTriple& shots) {
  for (const auto& r : shots) {
    const std::string name = "shots_" + std::string(to_string(r.basis));
    sink.csv(name + ".csv", [&](std::ostream& os) { io::write_shots_csv(os, r); });
    if (cfg.wants("bin")) io::write_shots_binary(sink.dir() / (name + ".bin"), r);
  }
}

ShotTriple read_shots(const fs::path& dir) {
  ShotTriple out;
  for (int k = 0; k < 3; ++k) {
    const std::string name = "shots_" + std::string(to_string(static_cast<Axis>(k)));
    if (fs::exists(dir / (name + ".csv"))) {
      std::istringstream is(io::read_text(dir / (name + ".csv")));
      out[k] = io::read_shots_csv(is);
    } else if (fs::exists(dir / (name + ".bin"))) {
      out[k] = io::read_shots_binary(dir / (name + ".bin"));
    } else {
      throw IncompleteData("missing shot record for basis " + std::string(to_string(static_cast<Axis>(k))) +
                           " in " + dir.string());
    }
  }
  return out;
}

// ---------------------------------------------------------------- commands

int cmd_crystal(const ExperimentConfig& cfg, Sink& sink, std::ostream& out) {
  const IonCrystal c = cfg.make_crystal();
  sink.text("crystal.json", io::crystal_to_json(c));
  out << "crystal: " << c.size() << " ions, R = " << c.radius() << " um, a = " << c.spacing()
      << " um\n";
  return kOk;
}

int cmd_prepare(const ExperimentConfig& cfg, Sink& sink, std::ostream& out) {
  const IonCrystal c = cfg.make_crystal();
  const DriveParams p = cfg.drive_params(c.radius());
  const TextureSpec spec = cfg.texture_spec();
  const BlochField lab = prepare(cfg, c, p, spec);
  const BlochField target = target_texture(c, spec, p.psi);
  const DiagnosticsReport r = analyze_field(c, lab, target);
  sink.text("crystal.json", io::crystal_to_json(c));
  write_field(sink, "field_lab.csv", lab);
  write_field(sink, "field_rotated.csv", to_rotated_basis(lab));
  write_field(sink, "target_lab.csv", target);
  sink.text("report.json", io::report_to_json(r));
  write_svg(sink, "texture.svg", c, to_rotated_basis(lab), render::Style::quiver, cfg.texture.kind);
  out << cfg.texture.kind << ": Q = " << r.Q << ", |Psi| = " << std::abs(r.order_parameter)
      << ", F = " << r.mean_fidelity << "\n";
  return kOk;
}

int cmd_measure(const ExperimentConfig& cfg, Sink& sink, std::ostream& out) {
  const IonCrystal c = cfg.make_crystal();
  const DriveParams p = cfg.drive_params(c.radius());
  const ShotTriple shots = shots_for(cfg, c, p, cfg.texture_spec());
  sink.text("crystal.json", io::crystal_to_json(c));
  write_shots(sink, cfg, shots);
  out << "measure: " << shots[0].n_shots << " shots x 3 bases on " << c.size() << " ions\n";
  return kOk;
}

int cmd_reconstruct(const ExperimentConfig& cfg, Sink& sink, const std::string& input,
                    std::ostream& out) {
  const fs::path dir = input.empty() ? sink.dir() : fs::path(input);
  const IonCrystal c = io::crystal_from_json(io::read_text(dir / "crystal.json"));
  const ShotTriple shots = read_shots(dir);
  const DriveParams p = cfg.drive_params(c.radius());
  const TargetFn target = texture_target(cfg.texture_spec(), p.psi);
  const BinnedAnalysis a = analyze_shots(c, shots, target, cfg.measurement.n_radial,
                                         cfg.measurement.n_azimuthal, cfg.measurement.fit_phase,
                                         bin_options(cfg));
  sink.csv("binned.csv", [&](std::ostream& os) { io::write_binned_csv(os, a.binned); });
  json rep = report_tree(a.report);
  rep["phase_offset_rad"] = a.phase_offset;
  rep["bins_non_empty"] = a.binned.non_empty();
  sink.json_doc("report.json", rep);
  write_binned_views(sink, a.binned, "binned");
  out << "reconstruct: Q = " << a.report.Q << ", |Psi| = " << std::abs(a.report.order_parameter)
      << ", F = " << a.report.mean_fidelity << " over " << a.binned.non_empty() << " bins\n";
  return kOk;
}

int cmd_diagnose(const ExperimentConfig& cfg, Sink& sink, const std::string& crystal_path,
                 const std::string& field_path, const std::string& target_path, bool dump,
                 std::ostream& out) {
  if (crystal_path.empty() || field_path.empty())
    throw ConfigError("diagnose needs --crystal and --field");
  const IonCrystal c = io::crystal_from_json(io::read_text(crystal_path));
  std::istringstream fs_(io::read_text(field_path));
  const BlochField f = io::read_field_csv(fs_);
  if (f.size() != c.size()) throw ParseError(field_path + ": field length does not match the crystal");
  BlochField target = f;
  if (!target_path.empty()) {
    std::istringstream ts(io::read_text(target_path));
    target = io::read_field_csv(ts);
  } else {
    const DriveParams p = cfg.drive_params(c.radius());
    target = target_texture(c, cfg.texture_spec(), p.psi);
  }
  const BlochField lab = f.basis() == Basis::lab ? f : to_lab_basis(f);
  DiagnosticsReport r = analyze_field(c, lab, target);
  sink.text("report.json", io::report_to_json(r));
  if (dump) {
    WindingOptions wo;
    wo.keep_triangles = true;
    const WindingResult w = winding_details(c, lab, wo);
    sink.csv("triangles.csv", [&](std::ostream& os) {
      os << "a,b,c,solid_angle\n";
      for (std::size_t k = 0; k < w.triangles.size(); ++k)
        os << w.triangles[k][0] << ',' << w.triangles[k][1] << ',' << w.triangles[k][2] << ','
           << io::format_double(w.solid_angles[k]) << '\n';
    });
  }
  out << "diagnose: Q = " << r.Q << " (" << r.triangle_count << " triangles), |Psi| = "
      << std::abs(r.order_parameter) << ", F = " << r.mean_fidelity << "\n";
  return kOk;
}

struct DomainWallRun {
  IonCrystal crystal;
  BlochField field;
  std::vector<std::pair<double, double>> profile;
  EdgeFit fit;
  double psi_expectation;
};

DomainWallRun run_domain_wall(const ExperimentConfig& cfg, Sink& sink) {
  const IonCrystal c = cfg.make_crystal();
  const DriveParams p = cfg.drive_params(c.radius());
  BeamParams beam = cfg.beam_params();
  if (beam.peak_repump_rate == 0.0) beam.peak_repump_rate = calibrate_peak_rate(beam);
  DomainWallOptions o;
  o.drive_angle = cfg.beam.drive_angle;
  o.mode = cfg.repump_mode();
  o.ideal_beam = cfg.beam.ideal;
  const BlochField f = prepare_domain_wall(c, p, beam, cfg.beam.seed, o);
  DomainWallOptions oe = o;
  oe.mode = RepumpMode::expectation;
  const BlochField fe = prepare_domain_wall(c, p, beam, cfg.beam.seed, oe);

  // P(up along Z') per ion from the lab x readout: Z' = -x.
  const ShotTriple shots =
      measure_field(f, cfg.measurement.n_shots, cfg.measurement.epsilon, cfg.measurement.seed,
                    cfg.workers);
  std::vector<std::pair<double, double>> profile;
  for (std::size_t j = 0; j < c.size(); ++j)
    profile.emplace_back(c[j].r_um, 1.0 - shots[0].ion_mean(j));
  const EdgeFit fit = fit_edge_width(profile);

  sink.text("crystal.json", io::crystal_to_json(c));
  sink.csv("sweep.csv", [&](std::ostream& os) { io::write_sweep_csv(os, sweep_schedule(beam)); });
  write_field(sink, "field_lab.csv", f);
  sink.csv("profile.csv", [&](std::ostream& os) {
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < c.size(); ++j)
      rows.push_back({static_cast<double>(j), profile[j].first, profile[j].second,
                      (1.0 - fe[j].x()) / 2.0});
    io::write_table_csv(os, {"id", "r_um", "p_up_measured", "p_up_expected"}, rows);
  });
  write_shots(sink, cfg, shots);
  sink.json_doc("edge_fit.json", {{"width_10_90_um", fit.width_10_90},
                                  {"std_error_um", fit.std_error},
                                  {"sigma_um", fit.sigma},
                                  {"r0_um", fit.r0},
                                  {"p_inner", fit.p_inner},
                                  {"p_outer", fit.p_outer},
                                  {"order_parameter_expectation", std::abs(order_parameter(c, fe))},
                                  {"order_parameter_sample", std::abs(order_parameter(c, f))},
                                  {"peak_repump_rate", beam.peak_repump_rate}});
  write_svg(sink, "domain_wall.svg", c, to_rotated_basis(f), render::Style::heatmap_z,
            "domain wall, Z' projection");
  return {c, f, profile, fit, std::abs(order_parameter(c, fe))};
}

int cmd_domain_wall(const ExperimentConfig& cfg, Sink& sink, std::ostream& out) {
  const DomainWallRun r = run_domain_wall(cfg, sink);
  out << "domain-wall: 10-90 width = " << r.fit.width_10_90 << " +- " << r.fit.std_error
      << " um, r0 = " << r.fit.r0 << " um, |Psi| = " << r.psi_expectation << "\n";
  return kOk;
}

std::vector<double> t_grid(const ExperimentConfig& cfg) {
  std::vector<double> T;
  const auto& n = cfg.noise;
  for (std::size_t k = 0; k < n.T_count; ++k)
    T.push_back(n.T_start_s + (n.T_stop_s - n.T_start_s) * static_cast<double>(k) /
                                  static_cast<double>(n.T_count - 1));
  return T;
}

int cmd_noise_echo(const ExperimentConfig& cfg, Sink& sink, std::ostream& out) {
  NoiseParams noise = cfg.noise_params();
  if (cfg.noise.calibrate_retention)
    noise.B_nT = calibrate_amplitude(noise, cfg.noise.calibrate_T_s, *cfg.noise.calibrate_retention);
  const std::vector<double> T = t_grid(cfg);

  // Coherent echo phase of a single equatorial spin, with readout noise.
  std::vector<io::EchoRow> rows;
  std::vector<std::pair<double, double>> series;
  for (std::size_t k = 0; k < T.size(); ++k) {
    const double phi = spin_echo_phase(noise, T[k]);
    auto eng = rng::make_engine(cfg.noise.seed, rng::kEchoT0, 1u << 20, k);
    const double u1 = 1.0 - rng::uniform01(eng), u2 = rng::uniform01(eng);
    const double dn =
        cfg.noise.phase_noise_rad * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    const double sx = std::cos(phi + dn), sy = std::sin(phi + dn);
    const double measured = extract_phase(sx, sy);
    rows.push_back({T[k], sx, sy, measured});
    series.emplace_back(T[k], measured);
  }
  sink.csv("echo.csv", [&](std::ostream& os) { io::write_echo_csv(os, rows); });

  json fit_doc;
  try {
    const NoiseFit fit = fit_noise_model(series, noise.gamma);
    fit_doc = {{"B_nT", fit.params.B_nT},
               {"f_hz", fit.params.f_hz},
               {"t0_s", fit.params.t0_s},
               {"residual_norm", fit.residual_norm}};
  } catch (const FitFailure& e) {
    fit_doc = {{"error", e.what()}};
  }

  const IonCrystal c = cfg.make_crystal();
  const DriveParams p = cfg.drive_params(c.radius());
  const BlochField tex = prepare(cfg, c, p, cfg.texture_spec());
  const T0Mode mode = cfg.noise.t0_mode == "fixed" ? T0Mode::fixed : T0Mode::random_uniform;
  const auto decay = simulate_echo_decay(c, tex, noise, T, mode, cfg.noise.n_samples, cfg.noise.seed);
  sink.csv("decay.csv", [&](std::ostream& os) {
    std::vector<std::vector<double>> r;
    for (const auto& d : decay)
      r.push_back({d.T, d.order_parameter, d.retention,
                   mode == T0Mode::fixed ? 1.0 : echo_retention_closed_form(noise, d.T)});
    io::write_table_csv(os, {"T", "order_parameter", "retention", "retention_closed_form"}, r);
  });
  const double cal_T = cfg.noise.calibrate_T_s;
  const auto at_cal = simulate_echo_decay(c, tex, noise, std::span<const double>(&cal_T, 1), mode,
                                          cfg.noise.n_samples, cfg.noise.seed);
  sink.json_doc("noise.json", {{"B_nT", noise.B_nT},
                               {"f_hz", noise.f_hz},
                               {"t0_s", noise.t0_s},
                               {"gamma_rad_s_per_nT", noise.gamma},
                               {"t0_mode", cfg.noise.t0_mode},
                               {"retention_at_calibration_T", at_cal[0].retention},
                               {"calibration_T_s", cal_T},
                               {"fit", fit_doc}});
  out << "noise-echo: B = " << noise.B_nT << " nT, retention(" << cal_T * 1e3
      << " ms) = " << at_cal[0].retention;
  if (fit_doc.contains("f_hz")) out << ", fitted f = " << fit_doc["f_hz"].get<double>() << " Hz";
  out << "\n";
  return kOk;
}

int cmd_rwa(const ExperimentConfig& cfg, Sink& sink, std::ostream& out) {
  const DriveParams p = cfg.drive_params(cfg.crystal.radius_um);
  const RwaReport r = check_rwa(p);
  sink.json_doc("rwa.json", {{"pass", r.pass},
                             {"ratio", r.ratio},
                             {"min_bound_hz", r.min_bound / kTwoPi},
                             {"ratio_2omega_rot", r.ratio_2omega_rot},
                             {"ratio_2omega_mw", r.ratio_2omega_mw},
                             {"ratio_2sum", r.ratio_2sum},
                             {"threshold", r.threshold}});
  out << "rwa-check: " << (r.pass ? "pass" : "fail") << ", ratio = " << std::setprecision(4)
      << r.ratio << " (min bound " << r.min_bound / kTwoPi / 1e3 << " kHz)\n";
  return kOk;
}

int cmd_render(Sink& sink, const std::string& crystal_path, const std::string& field_path,
               const std::string& binned_path, const std::string& style_name, bool rotate,
               const std::string& output, std::ostream& out) {
  const render::Style style = render::style_from_string(style_name);
  std::string svg;
  if (!binned_path.empty()) {
    std::istringstream is(io::read_text(binned_path));
    auto rows = io::read_binned_csv(is);
    double R = 0.0;
    if (!crystal_path.empty()) {
      R = io::crystal_from_json(io::read_text(crystal_path)).radius();
    } else {
      std::size_t nr = 0;
      double rmax = 0.0;
      for (const auto& r : rows) rmax = std::max(rmax, r.r_center);
      std::vector<double> radii;
      for (const auto& r : rows)
        if (std::find(radii.begin(), radii.end(), r.r_center) == radii.end()) radii.push_back(r.r_center);
      nr = radii.size();
      R = rmax * 2.0 * static_cast<double>(nr) / (2.0 * static_cast<double>(nr) - 1.0);
    }
    if (rotate)
      for (auto& r : rows)
        if (std::isfinite(r.u.x())) r.u = to_rotated(r.u);
    svg = render::binned_svg(rows, R, style, fs::path(binned_path).filename().string());
  } else {
    if (crystal_path.empty() || field_path.empty())
      throw ConfigError("render needs --crystal with --field, or --binned");
    const IonCrystal c = io::crystal_from_json(io::read_text(crystal_path));
    std::istringstream is(io::read_text(field_path));
    BlochField f = io::read_field_csv(is);
    if (f.size() != c.size()) throw ParseError(field_path + ": field length does not match the crystal");
    if (rotate && f.basis() == Basis::lab) f = to_rotated_basis(f);
    svg = render::field_svg(c, f, style, fs::path(field_path).filename().string());
  }
  const fs::path target = output.empty() ? sink.dir() / ("render_" + style_name + ".svg") : fs::path(output);
  io::write_text(target, svg);
  out << "render: wrote " << target.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- reproduce

int fig2(const ExperimentConfig& cfg, Sink& sink, std::ostream& out) {
  const IonCrystal c = cfg.make_crystal();
  const DriveParams p = cfg.drive_params(c.radius());
  const TextureSpec spec = TextureSpec::make(TextureKind::neel_skyrmion);
  const ShotTriple shots = shots_for(cfg, c, p, spec);
  const TargetFn target = texture_target(spec, p.psi);
  const BinnedAnalysis a = analyze_shots(c, shots, target, cfg.measurement.n_radial,
                                         cfg.measurement.n_azimuthal, cfg.measurement.fit_phase,
                                         bin_options(cfg));
  const BlochField ideal = prepare(cfg, c, p, spec);
  sink.text("crystal.json", io::crystal_to_json(c));
  sink.csv("binned.csv", [&](std::ostream& os) { io::write_binned_csv(os, a.binned); });
  write_binned_views(sink, a.binned, "projection");
  write_svg(sink, "ideal_quiver.svg", c, to_rotated_basis(ideal), render::Style::quiver,
            "ideal Neel skyrmion");
  json rep = report_tree(a.report);
  rep["phase_offset_rad"] = a.phase_offset;
  rep["ideal"] = report_tree(analyze_field(c, ideal, target_texture(c, spec, p.psi)));
  sink.json_doc("report.json", rep);
  out << "fig2: Q = " << a.report.Q << ", |Psi| = " << std::abs(a.report.order_parameter)
      << ", F = " << a.report.mean_fidelity << "\n";
  return kOk;
}

int fig3(const ExperimentConfig& cfg, Sink& sink, std::ostream& out) {
  const IonCrystal c = cfg.make_crystal();
  const DriveParams p = cfg.drive_params(c.radius());
  const std::size_t n = 31;
  const double t_max = 600e-6;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<double, double>> q_ideal, q_meas;
  std::vector<TimedField> trajectory;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t_max * static_cast<double>(k) / static_cast<double>(n - 1);
    TextureSpec spec = TextureSpec::make(TextureKind::neel_skyrmion);
    spec.drive_angle = p.omega_R * t;
    const BlochField f = prepare(cfg, c, p, spec);
    const double Q = winding_number(c, f);
    const double psi = std::abs(order_parameter(c, f));
    const ShotTriple shots =
        measure_field(f, cfg.measurement.n_shots, cfg.measurement.epsilon,
                      rng::stream_seed(cfg.measurement.seed, rng::kShots, k), cfg.workers);
    const BinnedAnalysis a = analyze_shots(c, shots, texture_target(spec, p.psi),
                                           cfg.measurement.n_radial, cfg.measurement.n_azimuthal,
                                           false, bin_options(cfg));
    rows.push_back({t, Q, winding_continuum(p.omega_R * t), psi, a.report.Q,
                    std::abs(a.report.order_parameter), a.report.mean_fidelity});
    q_ideal.emplace_back(t, Q);
    q_meas.emplace_back(t, a.report.Q);
    trajectory.push_back({t, f});
  }
  sink.csv("q_t.csv", [&](std::ostream& os) {
    io::write_table_csv(os, {"t_s", "Q_ideal", "Q_continuum", "psi_ideal", "Q_measured",
                             "psi_measured", "F_measured"},
                        rows);
  });
  json fits;
  auto try_fit = [&](const char* key, auto&& fn) {
    try {
      fits[key] = rate_json(fn());
    } catch (const FitFailure& e) {
      fits[key] = {{"error", e.what()}};
    }
  };
  try_fit("Q_ideal", [&] { return fit_omega_r(q_ideal); });
  try_fit("Q_measured", [&] { return fit_omega_r(q_meas); });
  try_fit("trajectory", [&] { return fit_omega_r(c, trajectory, p.psi); });
  fits["omega_R_input_hz"] = p.omega_R / kTwoPi;
  sink.json_doc("omega_fit.json", fits);
  out << "fig3: " << n << " time points over 600 us";
  if (fits["Q_measured"].contains("omega_R_hz"))
    out << ", fitted Omega_R/2pi = " << fits["Q_measured"]["omega_R_hz"].get<double>() << " Hz";
  out << "\n";
  return kOk;
}

int fig4(const ExperimentConfig& cfg, Sink& sink, std::ostream& out) {
  const DomainWallRun r = run_domain_wall(cfg, sink);
  const ShotTriple shots = measure_field(r.field, cfg.measurement.n_shots, cfg.measurement.epsilon,
                                         rng::stream_seed(cfg.measurement.seed, rng::kShots, 4),
                                         cfg.workers);
  const DriveParams p = cfg.drive_params(r.crystal.radius());
  TextureSpec spec = TextureSpec::make(TextureKind::domain_wall);
  spec.drive_angle = cfg.beam.drive_angle;
  const BinnedAnalysis a = analyze_shots(r.crystal, shots, texture_target(spec, p.psi),
                                         cfg.measurement.n_radial, cfg.measurement.n_azimuthal,
                                         false, bin_options(cfg));
  sink.csv("binned.csv", [&](std::ostream& os) { io::write_binned_csv(os, a.binned); });
  write_binned_views(sink, a.binned, "projection");
  sink.text("report.json", io::report_to_json(a.report));
  out << "fig4: 10-90 width = " << r.fit.width_10_90 << " um, |Psi| = " << r.psi_expectation
      << ", F = " << a.report.mean_fidelity << "\n";
  return kOk;
}

int fig5(const ExperimentConfig& cfg, Sink& sink, std::ostream& out) {
  const IonCrystal c = cfg.make_crystal();
  const DriveParams p = cfg.drive_params(c.radius());
  std::ostringstream table;
  table << "kind,Q,Q_oriented,order_parameter,mean_fidelity\n";
  for (TextureKind k : {TextureKind::neel_skyrmion, TextureKind::bloch_skyrmion,
                        TextureKind::bimeron, TextureKind::anti_skyrmion, TextureKind::meron,
                        TextureKind::skyrmionium}) {
    const TextureSpec spec = TextureSpec::make(k, cfg.texture.helicity);
    const BlochField f = prepare(cfg, c, p, spec);
    const DiagnosticsReport r = analyze_field(c, f, target_texture(c, spec, p.psi));
    const std::string name(to_string(k));
    table << name << ',' << io::format_double(r.Q) << ',' << io::format_double(r.Q_oriented) << ','
          << io::format_double(std::abs(r.order_parameter)) << ','
          << io::format_double(r.mean_fidelity) << '\n';
    write_field(sink, name + ".csv", f);
    write_svg(sink, name + ".svg", c, to_rotated_basis(f), render::Style::quiver, name);
    out << "fig5: " << name << " Q = " << r.Q_oriented << "\n";
  }
  sink.text("crystal.json", io::crystal_to_json(c));
  sink.text("textures.csv", table.str());
  return kOk;
}

int fig7(const ExperimentConfig& cfg, Sink& sink, std::ostream& out) {
  return cmd_noise_echo(cfg, sink, out);
}

int cmd_reproduce(const ExperimentConfig& cfg, Sink& sink, const std::string& target,
                  std::ostream& out) {
  Sink sub = sink.sub(target);
  emit_config(sub, cfg);
  if (target == "fig2") return fig2(cfg, sub, out);
  if (target == "fig3") return fig3(cfg, sub, out);
  if (target == "fig4") return fig4(cfg, sub, out);
  if (target == "fig5") return fig5(cfg, sub, out);
  if (target == "fig7") return fig7(cfg, sub, out);
  throw ConfigError("unknown reproduce target '" + target + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"spintex: spin textures on rotating ion crystals"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Experiment config (JSON)");
  app.add_option("--set", g.overrides, "Override a config key: dotted.key=value")->allow_extra_args(false);
  app.add_option("--seed", g.seed, "Master seed for every stochastic stage");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--format", g.formats, "Artifact formats to write")
      ->check(CLI::IsMember({"csv", "json", "svg", "bin"}))
      ->allow_extra_args(false);
  app.add_option("--workers", g.workers, "Worker threads");

  auto* crystal = app.add_subcommand("crystal", "Generate the ion crystal");
  auto* prep = app.add_subcommand("prepare", "Prepare a texture and report its diagnostics");
  auto* meas = app.add_subcommand("measure", "Simulate three-axis projective readout");
  auto* recon = app.add_subcommand("reconstruct", "Bin shot records and reconstruct Bloch vectors");
  std::string input_dir;
  recon->add_option("--input", input_dir, "Directory holding crystal.json and shots_*.csv");
  auto* diag = app.add_subcommand("diagnose", "Diagnostics of a stored field");
  std::string crystal_path, field_path, target_path, binned_path;
  bool dump = false;
  diag->add_option("--crystal", crystal_path)->required();
  diag->add_option("--field", field_path)->required();
  diag->add_option("--target", target_path);
  diag->add_flag("--dump-triangles", dump);
  auto* dw = app.add_subcommand("domain-wall", "Domain-wall preparation and edge-width fit");
  auto* noise = app.add_subcommand("noise-echo", "Spin-echo phase, texture decay and noise fit");
  auto* rwa = app.add_subcommand("rwa-check", "Rotating-wave validity margins");
  auto* rend = app.add_subcommand("render", "Render a field or binned export as SVG");
  std::string style = "quiver", render_out;
  bool rotate = false;
  rend->add_option("--crystal", crystal_path);
  rend->add_option("--field", field_path);
  rend->add_option("--binned", binned_path);
  rend->add_option("--style", style)->check(
      CLI::IsMember({"quiver", "heatmap-x", "heatmap-y", "heatmap-z"}));
  rend->add_flag("--rotated", rotate, "Convert lab vectors to the rotated basis first");
  rend->add_option("-o,--output", render_out, "SVG path");
  auto* repro = app.add_subcommand("reproduce", "Run a figure pipeline");
  std::string fig;
  repro->add_option("target", fig, "fig2, fig3, fig4, fig5 or fig7")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "fig7"}));

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kOk : kConfig;
  }

  try {
    const ExperimentConfig cfg = load_config(g);
    Sink sink(cfg.output.directory, cfg);
    if (!repro->parsed()) emit_config(sink, cfg);
    if (crystal->parsed()) return cmd_crystal(cfg, sink, out);
    if (prep->parsed()) return cmd_prepare(cfg, sink, out);
    if (meas->parsed()) return cmd_measure(cfg, sink, out);
    if (recon->parsed()) return cmd_reconstruct(cfg, sink, input_dir, out);
    if (diag->parsed())
      return cmd_diagnose(cfg, sink, crystal_path, field_path, target_path, dump, out);
    if (dw->parsed()) return cmd_domain_wall(cfg, sink, out);
    if (noise->parsed()) return cmd_noise_echo(cfg, sink, out);
    if (rwa->parsed()) return cmd_rwa(cfg, sink, out);
    if (rend->parsed())
      return cmd_render(sink, crystal_path, field_path, binned_path, style, rotate, render_out, out);
    if (repro->parsed()) return cmd_reproduce(cfg, sink, fig, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const InvalidParameter& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const FitFailure& e) {
    err << "fit failure: " << e.what() << "\n";
    return kFit;
  } catch (const NoUniquePhase& e) {
    err << "fit failure: " << e.what() << "\n";
    return kFit;
  } catch (const ParseError& e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const IncompleteData& e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace spintex::cli
