// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "spintex/errors.hpp"

namespace spintex::io {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

namespace {

double parse_double(const std::string& s, std::size_t line) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && *b == ' ') ++b;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw ParseError("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::size_t parse_size(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string crystal_to_json(const IonCrystal& crystal) {
  // Built by hand so doubles keep their shortest round-trip form.
  std::ostringstream os;
  os << "{\n  \"R_um\": " << format_double(crystal.radius())
     << ",\n  \"spacing_um\": " << format_double(crystal.spacing()) << ",\n  \"ions\": [";
  for (std::size_t j = 0; j < crystal.size(); ++j) {
    os << (j ? ",\n" : "\n") << "    {\"id\": " << j
       << ", \"r_um\": " << format_double(crystal[j].r_um)
       << ", \"phi_rad\": " << format_double(crystal[j].phi_rad) << "}";
  }
  os << "\n  ]\n}\n";
  return os.str();
}

IonCrystal crystal_from_json(const std::string& text) {
  const json j = parse_json(text, "crystal");
  try {
    std::vector<IonPosition> pos;
    const auto& ions = j.at("ions");
    if (!ions.is_array() || ions.empty()) throw ParseError("crystal: 'ions' must be a non-empty array");
    for (std::size_t k = 0; k < ions.size(); ++k) {
      const auto& ion = ions[k];
      if (ion.contains("id") && ion.at("id").get<std::size_t>() != k)
        throw ParseError("crystal: ion record " + std::to_string(k) + " is out of order");
      pos.push_back({ion.at("r_um").get<double>(), ion.at("phi_rad").get<double>()});
    }
    return IonCrystal(std::move(pos), j.at("R_um").get<double>(), j.at("spacing_um").get<double>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("crystal: ") + e.what());
  } catch (const InvalidParameter& e) {
    throw ParseError(std::string("crystal: ") + e.what());
  }
}

void write_field_csv(std::ostream& os, const BlochField& field) {
  os << "# basis: " << (field.basis() == Basis::lab ? "lab" : "rotated") << "\n";
  os << "id,ux,uy,uz\n";
  for (std::size_t j = 0; j < field.size(); ++j) {
    const Vec3& u = field[j];
    os << j << ',' << format_double(u.x()) << ',' << format_double(u.y()) << ','
       << format_double(u.z()) << '\n';
  }
}

BlochField read_field_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  Basis basis = Basis::lab;
  bool header = false;
  std::vector<Vec3> v;
  while (std::getline(is, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# basis: ", 0) == 0) {
        const std::string b = line.substr(9);
        if (b == "lab")
          basis = Basis::lab;
        else if (b == "rotated")
          basis = Basis::rotated;
        else
          throw ParseError("line " + std::to_string(lineno) + ": unknown basis '" + b + "'");
      }
      continue;
    }
    if (!header) {
      if (line != "id,ux,uy,uz")
        throw ParseError("line " + std::to_string(lineno) + ": expected header id,ux,uy,uz");
      header = true;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != 4)
      throw ParseError("line " + std::to_string(lineno) + ": expected 4 columns");
    if (parse_size(cells[0], lineno) != v.size())
      throw ParseError("line " + std::to_string(lineno) + ": ion ids must be consecutive from 0");
    v.emplace_back(parse_double(cells[1], lineno), parse_double(cells[2], lineno),
                   parse_double(cells[3], lineno));
  }
  if (v.empty()) throw ParseError("field file holds no records");
  try {
    return BlochField(std::move(v), basis);
  } catch (const InvalidParameter& e) {
    throw ParseError(std::string("field: ") + e.what());
  }
}

void write_shots_csv(std::ostream& os, const ShotRecord& r) {
  os << "# basis: " << to_string(r.basis) << "\n# n_shots: " << r.n_shots
     << "\n# n_ions: " << r.n_ions << "\n# seed: " << r.seed
     << "\n# epsilon: " << format_double(r.epsilon) << "\nshot,ion,bit\n";
  for (std::size_t s = 0; s < r.n_shots; ++s)
    for (std::size_t j = 0; j < r.n_ions; ++j)
      os << s << ',' << j << ',' << static_cast<int>(r.at(s, j)) << '\n';
}

ShotRecord read_shots_csv(std::istream& is) {
  ShotRecord r;
  std::string line;
  std::size_t lineno = 0;
  bool header = false, have_shape = false;
  std::size_t next = 0;
  while (std::getline(is, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(2, colon - 2);
      const std::string val = line.substr(colon + 2);
      if (key == "basis")
        r.basis = axis_from_string(val);
      else if (key == "n_shots")
        r.n_shots = parse_size(val, lineno);
      else if (key == "n_ions")
        r.n_ions = parse_size(val, lineno);
      else if (key == "seed")
        r.seed = std::stoull(val);
      else if (key == "epsilon")
        r.epsilon = parse_double(val, lineno);
      continue;
    }
    if (!header) {
      if (line != "shot,ion,bit")
        throw ParseError("line " + std::to_string(lineno) + ": expected header shot,ion,bit");
      header = true;
      have_shape = r.n_shots > 0 && r.n_ions > 0;
      if (!have_shape) throw ParseError("shot file is missing n_shots / n_ions");
      r.outcomes.assign(r.n_shots * r.n_ions, 0);
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != 3) throw ParseError("line " + std::to_string(lineno) + ": expected 3 columns");
    const std::size_t s = parse_size(cells[0], lineno), j = parse_size(cells[1], lineno);
    const std::size_t bit = parse_size(cells[2], lineno);
    if (s * r.n_ions + j != next || j >= r.n_ions || bit > 1)
      throw ParseError("line " + std::to_string(lineno) + ": record out of order or out of range");
    r.outcomes[next++] = static_cast<std::uint8_t>(bit);
  }
  if (!header || next != r.outcomes.size() || r.outcomes.empty())
    throw ParseError("shot file is truncated: " + std::to_string(next) + " records");
  r.validate();
  return r;
}

void write_shots_binary(const fs::path& path, const ShotRecord& r) {
  json h = {{"basis", to_string(r.basis)}, {"n_shots", r.n_shots}, {"n_ions", r.n_ions},
            {"seed", r.seed}, {"epsilon", r.epsilon}};
  write_text(path.string() + ".json", h.dump(2) + "\n");
  write_text(path, std::string(r.outcomes.begin(), r.outcomes.end()));
}

ShotRecord read_shots_binary(const fs::path& path) {
  const json h = parse_json(read_text(path.string() + ".json"), "shot header");
  ShotRecord r;
  try {
    r.basis = axis_from_string(h.at("basis").get<std::string>());
    r.n_shots = h.at("n_shots").get<std::size_t>();
    r.n_ions = h.at("n_ions").get<std::size_t>();
    r.seed = h.at("seed").get<std::uint64_t>();
    r.epsilon = h.at("epsilon").get<double>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("shot header: ") + e.what());
  }
  const std::string bytes = read_text(path);
  if (bytes.size() != r.n_shots * r.n_ions)
    throw ParseError("shot payload has " + std::to_string(bytes.size()) + " bytes, expected " +
                     std::to_string(r.n_shots * r.n_ions));
  r.outcomes.assign(bytes.begin(), bytes.end());
  for (std::size_t k = 0; k < r.outcomes.size(); ++k)
    if (r.outcomes[k] > 1) throw ParseError("shot payload byte " + std::to_string(k) + " is not 0/1");
  r.validate();
  return r;
}

void write_binned_csv(std::ostream& os, const BinnedField& b) {
  os << "r_center,phi_center,px,py,pz,ux,uy,uz,n_ions\n";
  const double nan = std::nan("");
  for (const auto& bin : b.bins) {
    os << format_double(bin.r_center) << ',' << format_double(bin.phi_center);
    for (int k = 0; k < 3; ++k)
      os << ',' << format_double(bin.has_basis[k] && !bin.empty() ? bin.p_up[k] : nan);
    for (int k = 0; k < 3; ++k) os << ',' << format_double(bin.reconstructed ? bin.u[k] : nan);
    os << ',' << bin.n_ions << '\n';
  }
}

std::vector<BinnedRow> read_binned_csv(std::istream& is) {
  std::vector<BinnedRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "r_center,phi_center,px,py,pz,ux,uy,uz,n_ions")
        throw ParseError("line " + std::to_string(lineno) + ": unexpected binned header");
      header = true;
      continue;
    }
    const auto c = split(line);
    if (c.size() != 9) throw ParseError("line " + std::to_string(lineno) + ": expected 9 columns");
    BinnedRow r;
    r.r_center = parse_double(c[0], lineno);
    r.phi_center = parse_double(c[1], lineno);
    for (int k = 0; k < 3; ++k) {
      r.p[k] = parse_double(c[2 + k], lineno);
      r.u[k] = parse_double(c[5 + k], lineno);
    }
    r.n_ions = parse_size(c[8], lineno);
    rows.push_back(r);
  }
  if (rows.empty()) throw ParseError("binned file holds no records");
  return rows;
}

std::string report_to_json(const DiagnosticsReport& r) {
  json j;
  j["Q"] = r.Q;
  j["Q_oriented"] = r.Q_oriented;
  j["order_parameter"] = {{"abs", std::abs(r.order_parameter)},
                          {"arg", std::arg(r.order_parameter)},
                          {"re", r.order_parameter.real()},
                          {"im", r.order_parameter.imag()}};
  j["mean_fidelity"] = r.mean_fidelity;
  j["triangle_count"] = r.triangle_count;
  j["hull_count"] = r.hull_count;
  j["site_count"] = r.site_count;
  j["excluded_sites"] = r.excluded_sites;
  if (r.has_omega_R)
    j["omega_R_fit"] = {{"value_rad_s", r.omega_R_fit},
                        {"std_error_rad_s", r.omega_R_std_error},
                        {"value_hz", r.omega_R_fit / kTwoPi}};
  if (r.has_edge_width)
    j["edge_width_10_90"] = {{"value_um", r.edge_width_10_90}, {"std_error_um", r.edge_width_std_error}};
  return j.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepStep>& schedule) {
  os << "position_um,dwell_s,power\n";
  for (const auto& s : schedule)
    os << format_double(s.position_um) << ',' << format_double(s.dwell_s) << ','
       << format_double(s.power) << '\n';
}

void write_echo_csv(std::ostream& os, const std::vector<EchoRow>& rows) {
  os << "T,sx,sy,phi_se\n";
  for (const auto& r : rows)
    os << format_double(r.T) << ',' << format_double(r.sx) << ',' << format_double(r.sy) << ','
       << format_double(r.phi_se) << '\n';
}

void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_double(row[k]);
    os << '\n';
  }
}

}  // namespace spintex::io
