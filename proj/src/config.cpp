// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/config.hpp"

#include <algorithm>
#include <json.hpp>

#include "spintex/errors.hpp"
#include "spintex/rng.hpp"

namespace spintex {

using nlohmann::json;

namespace {

template <class T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

json to_json_tree(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["workers"] = c.workers;
  j["crystal"] = {{"spacing_um", c.crystal.spacing_um}, {"n_ions", c.crystal.n_ions},
                  {"radius_um", c.crystal.radius_um},   {"jitter_um", c.crystal.jitter_um},
                  {"seed", c.crystal.seed}};
  auto& d = j["drive"];
  d = {{"omega_R_hz", c.drive.omega_R_hz},       {"eta_x", c.drive.eta_x},
       {"psi_rad", c.drive.psi_rad},             {"omega_mw_hz", c.drive.omega_mw_hz},
       {"omega_rot_hz", c.drive.omega_rot_hz},   {"delta_theta_deg", c.drive.delta_theta_deg},
       {"theta_odf_deg", c.drive.theta_odf_deg}, {"use_ode", c.drive.use_ode},
       {"substeps", c.drive.substeps}};
  put_opt(d, "mu_r_hz", c.drive.mu_r_hz);
  auto& t = j["texture"];
  t = {{"kind", c.texture.kind}, {"helicity", c.texture.helicity}};
  put_opt(t, "drive_angle", c.texture.drive_angle);
  j["measurement"] = {{"n_shots", c.measurement.n_shots},
                      {"epsilon", c.measurement.epsilon},
                      {"n_radial", c.measurement.n_radial},
                      {"n_azimuthal", c.measurement.n_azimuthal},
                      {"seed", c.measurement.seed},
                      {"randomize_orientation", c.measurement.randomize_orientation},
                      {"fit_phase", c.measurement.fit_phase},
                      {"phase_jitter_rad", c.measurement.phase_jitter_rad}};
  j["beam"] = {{"waist_um", c.beam.waist_um},
               {"sweep_start_um", c.beam.sweep_start_um},
               {"sweep_end_um", c.beam.sweep_end_um},
               {"step_um", c.beam.step_um},
               {"dwell_s", c.beam.dwell_s},
               {"peak_repump_rate", c.beam.peak_repump_rate},
               {"rotation_period_s", c.beam.rotation_period_s},
               {"power_table", c.beam.power_table},
               {"mode", c.beam.mode},
               {"ideal", c.beam.ideal},
               {"drive_angle", c.beam.drive_angle},
               {"seed", c.beam.seed}};
  auto& n = j["noise"];
  n = {{"B_nT", c.noise.B_nT},
       {"f_hz", c.noise.f_hz},
       {"t0_s", c.noise.t0_s},
       {"gamma_rad_s_per_nT", c.noise.gamma_rad_s_per_nT},
       {"T_start_s", c.noise.T_start_s},
       {"T_stop_s", c.noise.T_stop_s},
       {"T_count", c.noise.T_count},
       {"t0_mode", c.noise.t0_mode},
       {"n_samples", c.noise.n_samples},
       {"calibrate_T_s", c.noise.calibrate_T_s},
       {"phase_noise_rad", c.noise.phase_noise_rad},
       {"seed", c.noise.seed}};
  put_opt(n, "calibrate_retention", c.noise.calibrate_retention);
  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
  return j;
}

// Rejects keys absent from the defaults tree; reports the dotted path.
void check_keys(const json& given, const json& known, const std::string& prefix) {
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!known.contains(it.key())) throw ConfigError("unknown config key '" + path + "'");
    const json& k = known.at(it.key());
    if (k.is_object()) {
      if (!it.value().is_object()) throw ConfigError("config key '" + path + "' must be an object");
      check_keys(it.value(), k, path);
    }
  }
}

void merge(json& base, const json& over) {
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object())
      merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

template <class T>
void get(const json& j, const char* section, const char* key, T& out) {
  try {
    out = j.at(section).at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + std::string(section) + "." + key + "' has the wrong type");
  }
}

template <class T>
void get_opt(const json& j, const char* section, const char* key, std::optional<T>& out) {
  const json& v = j.at(section).at(key);
  if (v.is_null()) {
    out.reset();
    return;
  }
  T value{};
  get(j, section, key, value);
  out = value;
}

ExperimentConfig from_tree(const json& j) {
  ExperimentConfig c;
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion)
      throw ConfigError("config key 'schema_version' must be " + std::to_string(kSchemaVersion));
    c.workers = j.at("workers").get<unsigned>();
  } catch (const json::exception&) {
    throw ConfigError("config keys 'schema_version' / 'workers' must be integers");
  }
  get(j, "crystal", "spacing_um", c.crystal.spacing_um);
  get(j, "crystal", "n_ions", c.crystal.n_ions);
  get(j, "crystal", "radius_um", c.crystal.radius_um);
  get(j, "crystal", "jitter_um", c.crystal.jitter_um);
  get(j, "crystal", "seed", c.crystal.seed);
  get(j, "drive", "omega_R_hz", c.drive.omega_R_hz);
  get(j, "drive", "eta_x", c.drive.eta_x);
  get(j, "drive", "psi_rad", c.drive.psi_rad);
  get(j, "drive", "omega_mw_hz", c.drive.omega_mw_hz);
  get(j, "drive", "omega_rot_hz", c.drive.omega_rot_hz);
  get_opt(j, "drive", "mu_r_hz", c.drive.mu_r_hz);
  get(j, "drive", "delta_theta_deg", c.drive.delta_theta_deg);
  get(j, "drive", "theta_odf_deg", c.drive.theta_odf_deg);
  get(j, "drive", "use_ode", c.drive.use_ode);
  get(j, "drive", "substeps", c.drive.substeps);
  get(j, "texture", "kind", c.texture.kind);
  get_opt(j, "texture", "drive_angle", c.texture.drive_angle);
  get(j, "texture", "helicity", c.texture.helicity);
  get(j, "measurement", "n_shots", c.measurement.n_shots);
  get(j, "measurement", "epsilon", c.measurement.epsilon);
  get(j, "measurement", "n_radial", c.measurement.n_radial);
  get(j, "measurement", "n_azimuthal", c.measurement.n_azimuthal);
  get(j, "measurement", "seed", c.measurement.seed);
  get(j, "measurement", "randomize_orientation", c.measurement.randomize_orientation);
  get(j, "measurement", "fit_phase", c.measurement.fit_phase);
  get(j, "measurement", "phase_jitter_rad", c.measurement.phase_jitter_rad);
  get(j, "beam", "waist_um", c.beam.waist_um);
  get(j, "beam", "sweep_start_um", c.beam.sweep_start_um);
  get(j, "beam", "sweep_end_um", c.beam.sweep_end_um);
  get(j, "beam", "step_um", c.beam.step_um);
  get(j, "beam", "dwell_s", c.beam.dwell_s);
  get(j, "beam", "peak_repump_rate", c.beam.peak_repump_rate);
  get(j, "beam", "rotation_period_s", c.beam.rotation_period_s);
  get(j, "beam", "power_table", c.beam.power_table);
  get(j, "beam", "mode", c.beam.mode);
  get(j, "beam", "ideal", c.beam.ideal);
  get(j, "beam", "drive_angle", c.beam.drive_angle);
  get(j, "beam", "seed", c.beam.seed);
  get(j, "noise", "B_nT", c.noise.B_nT);
  get(j, "noise", "f_hz", c.noise.f_hz);
  get(j, "noise", "t0_s", c.noise.t0_s);
  get(j, "noise", "gamma_rad_s_per_nT", c.noise.gamma_rad_s_per_nT);
  get(j, "noise", "T_start_s", c.noise.T_start_s);
  get(j, "noise", "T_stop_s", c.noise.T_stop_s);
  get(j, "noise", "T_count", c.noise.T_count);
  get(j, "noise", "t0_mode", c.noise.t0_mode);
  get(j, "noise", "n_samples", c.noise.n_samples);
  get_opt(j, "noise", "calibrate_retention", c.noise.calibrate_retention);
  get(j, "noise", "calibrate_T_s", c.noise.calibrate_T_s);
  get(j, "noise", "phase_noise_rad", c.noise.phase_noise_rad);
  get(j, "noise", "seed", c.noise.seed);
  get(j, "output", "directory", c.output.directory);
  get(j, "output", "formats", c.output.formats);
  c.validate();
  return c;
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError("config key '" + std::string(key) + "' " + what);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(crystal.radius_um > 0.0, "crystal.radius_um", "must be > 0");
  require(crystal.spacing_um > 0.0 || crystal.n_ions > 0, "crystal.n_ions",
          "must be > 0 when crystal.spacing_um is 0");
  require(crystal.spacing_um >= 0.0, "crystal.spacing_um", "must be >= 0");
  require(crystal.jitter_um >= 0.0, "crystal.jitter_um", "must be >= 0");
  require(drive.omega_R_hz >= 0.0, "drive.omega_R_hz", "must be >= 0");
  require(drive.eta_x > 0.0, "drive.eta_x", "must be > 0");
  require(measurement.n_shots >= 1, "measurement.n_shots", "must be >= 1");
  require(measurement.epsilon >= 0.0 && measurement.epsilon < 0.5, "measurement.epsilon",
          "must lie in [0, 0.5)");
  require(measurement.n_radial >= 1, "measurement.n_radial", "must be >= 1");
  require(measurement.n_azimuthal >= 1, "measurement.n_azimuthal", "must be >= 1");
  require(measurement.phase_jitter_rad >= 0.0, "measurement.phase_jitter_rad", "must be >= 0");
  require(beam.mode == "bernoulli" || beam.mode == "expectation", "beam.mode",
          "must be 'bernoulli' or 'expectation'");
  require(noise.t0_mode == "random" || noise.t0_mode == "fixed", "noise.t0_mode",
          "must be 'random' or 'fixed'");
  require(noise.f_hz > 0.0, "noise.f_hz", "must be > 0");
  require(noise.gamma_rad_s_per_nT > 0.0, "noise.gamma_rad_s_per_nT", "must be > 0");
  require(noise.T_count >= 2, "noise.T_count", "must be >= 2");
  require(noise.T_stop_s > noise.T_start_s && noise.T_start_s >= 0.0, "noise.T_stop_s",
          "must exceed noise.T_start_s >= 0");
  if (noise.calibrate_retention)
    require(*noise.calibrate_retention > 0.0 && *noise.calibrate_retention < 1.0,
            "noise.calibrate_retention", "must lie in (0, 1)");
  for (const auto& f : output.formats)
    require(f == "csv" || f == "json" || f == "svg" || f == "bin", "output.formats",
            "entries must be csv, json, svg or bin");
  try {
    texture_kind_from_string(texture.kind);
  } catch (const InvalidParameter&) {
    throw ConfigError("config key 'texture.kind' names an unknown texture '" + texture.kind + "'");
  }
  try {
    beam_params().validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("config section 'beam': ") + e.what());
  }
}

IonCrystal ExperimentConfig::make_crystal() const {
  CrystalOptions o;
  o.radius_um = crystal.radius_um;
  o.spacing_um = crystal.spacing_um > 0.0 ? crystal.spacing_um
                                          : spacing_for_ion_count(crystal.n_ions, crystal.radius_um);
  o.jitter_um = crystal.jitter_um;
  o.seed = crystal.seed;
  return generate_crystal(o);
}

DriveParams ExperimentConfig::drive_params(double R_um) const {
  DriveParams p = DriveParams::resonant(angular(drive.omega_R_hz), drive.eta_x, R_um,
                                        angular(drive.omega_mw_hz), angular(drive.omega_rot_hz),
                                        drive.psi_rad, drive.delta_theta_deg, drive.theta_odf_deg);
  if (drive.mu_r_hz) p.mu_r = angular(*drive.mu_r_hz);
  return p;
}

TextureSpec ExperimentConfig::texture_spec() const {
  TextureSpec s = TextureSpec::make(texture_kind_from_string(texture.kind), texture.helicity);
  if (texture.drive_angle) s.drive_angle = *texture.drive_angle;
  return s;
}

BeamParams ExperimentConfig::beam_params() const {
  BeamParams b;
  b.waist_um = beam.waist_um;
  b.sweep_start_um = beam.sweep_start_um;
  b.sweep_end_um = beam.sweep_end_um;
  b.step_um = beam.step_um;
  b.dwell_s = beam.dwell_s;
  b.peak_repump_rate = beam.peak_repump_rate;
  b.rotation_period_s = beam.rotation_period_s;
  b.power_table = beam.power_table;
  return b;
}

NoiseParams ExperimentConfig::noise_params() const {
  return {noise.B_nT, noise.f_hz, noise.t0_s, noise.gamma_rad_s_per_nT};
}

RepumpMode ExperimentConfig::repump_mode() const {
  return beam.mode == "expectation" ? RepumpMode::expectation : RepumpMode::bernoulli;
}

bool ExperimentConfig::wants(const std::string& format) const {
  return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

std::string config_to_json(const ExperimentConfig& config) {
  return to_json_tree(config).dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  json given;
  try {
    given = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!given.is_object()) throw ConfigError("config root must be an object");
  if (!given.contains("schema_version")) throw ConfigError("config key 'schema_version' is required");
  json tree = to_json_tree(ExperimentConfig{});
  check_keys(given, tree, "");
  merge(tree, given);
  return from_tree(tree);
}

ExperimentConfig apply_overrides(const ExperimentConfig& config,
                                 const std::vector<std::string>& overrides) {
  json tree = to_json_tree(config);
  const json known = tree;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override '" + o + "' must have the form key=value");
    const std::string key = o.substr(0, eq);
    const std::string raw = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    json* node = &tree;
    const json* ref = &known;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (!ref->is_object() || !ref->contains(part))
        throw ConfigError("unknown config key '" + key + "'");
      ref = &ref->at(part);
      if (dot == std::string::npos) {
        if (ref->is_object()) throw ConfigError("config key '" + key + "' is a section");
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  return from_tree(tree);
}

void set_master_seed(ExperimentConfig& config, std::uint64_t seed) {
  config.crystal.seed = rng::stream_seed(seed, 11, 0);
  config.measurement.seed = rng::stream_seed(seed, 12, 0);
  config.beam.seed = rng::stream_seed(seed, 13, 0);
  config.noise.seed = rng::stream_seed(seed, 14, 0);
}

}  // namespace spintex
