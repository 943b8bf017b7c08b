// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "spintex/cli.hpp"
#include "spintex/config.hpp"
#include "spintex/diagnostics.hpp"
#include "spintex/dynamics.hpp"
#include "spintex/errors.hpp"
#include "spintex/geometry.hpp"
#include "spintex/io.hpp"
#include "spintex/measurement.hpp"
#include "spintex/noise.hpp"
#include "spintex/pipeline.hpp"
#include "spintex/protocols.hpp"

namespace py = pybind11;
using namespace spintex;

namespace {

py::array_t<double> vectors_to_array(const BlochField& f) {
  py::array_t<double> a({static_cast<py::ssize_t>(f.size()), py::ssize_t{3}});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t j = 0; j < f.size(); ++j)
    for (int k = 0; k < 3; ++k) m(j, k) = f[j][k];
  return a;
}

BlochField field_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a,
                            Basis basis) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw InvalidParameter("expected an (N, 3) array");
  auto m = a.unchecked<2>();
  std::vector<Vec3> v;
  v.reserve(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t j = 0; j < a.shape(0); ++j) v.emplace_back(m(j, 0), m(j, 1), m(j, 2));
  return BlochField(std::move(v), basis);
}

std::vector<std::pair<double, double>> pairs(py::array_t<double> x, py::array_t<double> y) {
  if (x.size() != y.size()) throw InvalidParameter("x and y lengths differ");
  auto xs = x.unchecked<1>();
  auto ys = y.unchecked<1>();
  std::vector<std::pair<double, double>> out;
  for (py::ssize_t i = 0; i < x.size(); ++i) out.emplace_back(xs(i), ys(i));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "spintex core bindings";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "SpintexError", PyExc_RuntimeError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", base.ptr());
  py::register_exception<NumericalFailure>(m, "NumericalFailure", base.ptr());
  py::register_exception<FitFailure>(m, "FitFailure", base.ptr());
  py::register_exception<IncompleteData>(m, "IncompleteData", base.ptr());
  py::register_exception<NoUniquePhase>(m, "NoUniquePhase", base.ptr());
  py::register_exception<DegenerateSpin>(m, "DegenerateSpin", base.ptr());
  py::register_exception<TriangulationError>(m, "TriangulationError", base.ptr());
  py::register_exception<UndefinedPhase>(m, "UndefinedPhase", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::enum_<Basis>(m, "Basis").value("lab", Basis::lab).value("rotated", Basis::rotated);

  py::class_<IonCrystal>(m, "IonCrystal")
      .def_property_readonly("radius", &IonCrystal::radius)
      .def_property_readonly("spacing", &IonCrystal::spacing)
      .def("__len__", &IonCrystal::size)
      .def_property_readonly("r", [](const IonCrystal& c) {
        std::vector<double> r;
        for (const auto& p : c.positions()) r.push_back(p.r_um);
        return py::array_t<double>(r.size(), r.data());
      })
      .def_property_readonly("phi", [](const IonCrystal& c) {
        std::vector<double> r;
        for (const auto& p : c.positions()) r.push_back(p.phi_rad);
        return py::array_t<double>(r.size(), r.data());
      })
      .def("rotated", &IonCrystal::rotated)
      .def("to_json", [](const IonCrystal& c) { return io::crystal_to_json(c); })
      .def_static("from_json", &io::crystal_from_json);

  m.def("generate_crystal",
        [](double spacing, double radius, double jitter, std::uint64_t seed) {
          return generate_crystal(CrystalOptions{spacing, radius, jitter, seed});
        },
        py::arg("spacing_um"), py::arg("radius_um"), py::arg("jitter_um") = 0.0,
        py::arg("seed") = 0);
  m.def("spacing_for_ion_count", &spacing_for_ion_count, py::arg("n_ions"), py::arg("radius_um"));

  py::class_<BlochField>(m, "BlochField")
      .def(py::init(&field_from_array), py::arg("vectors"), py::arg("basis") = Basis::lab)
      .def_property_readonly("vectors", &vectors_to_array)
      .def_property_readonly("basis", &BlochField::basis)
      .def("__len__", &BlochField::size)
      .def("to_rotated", [](const BlochField& f) { return to_rotated_basis(f); })
      .def("to_lab", [](const BlochField& f) { return to_lab_basis(f); })
      .def("to_csv", [](const BlochField& f) {
        std::ostringstream os;
        io::write_field_csv(os, f);
        return os.str();
      })
      .def_static("from_csv", [](const std::string& text) {
        std::istringstream is(text);
        return io::read_field_csv(is);
      });

  py::class_<DriveParams>(m, "DriveParams")
      .def(py::init<>())
      .def_static("resonant", &DriveParams::resonant, py::arg("omega_R"), py::arg("eta_x"),
                  py::arg("R_um"), py::arg("omega_mw"), py::arg("omega_rot"),
                  py::arg("psi") = kPi / 2.0, py::arg("delta_theta_deg") = 0.04,
                  py::arg("theta_odf_deg") = 18.0)
      .def_static("experiment", &DriveParams::experiment, py::arg("omega_mw_hz") = 26e3)
      .def("with_eta_scaled", &DriveParams::with_eta_scaled)
      .def_readwrite("omega_R", &DriveParams::omega_R)
      .def_readwrite("delta_ac", &DriveParams::delta_ac)
      .def_readwrite("eta_x", &DriveParams::eta_x)
      .def_readwrite("psi", &DriveParams::psi)
      .def_readwrite("omega_mw", &DriveParams::omega_mw)
      .def_readwrite("omega_rot", &DriveParams::omega_rot)
      .def_readwrite("mu_r", &DriveParams::mu_r)
      .def_readwrite("R_um", &DriveParams::R_um);

  m.def("evolve_closed_form", &evolve_closed_form, py::arg("crystal"), py::arg("params"), py::arg("t"));
  m.def("evolve_bloch_ode",
        [](const IonCrystal& c, const DriveParams& p, const BlochField& init, double t) {
          return evolve_bloch_ode(c, p, init, t);
        },
        py::arg("crystal"), py::arg("params"), py::arg("initial"), py::arg("t"));
  m.def("evolve_full_drive",
        [](const IonCrystal& c, const DriveParams& p, double t, std::size_t substeps, unsigned workers) {
          py::gil_scoped_release release;
          FullDriveOptions o;
          o.workers = workers;
          return evolve_full_drive(c, p, t, substeps ? substeps : default_substeps(p, t), o);
        },
        py::arg("crystal"), py::arg("params"), py::arg("t"), py::arg("substeps") = 0,
        py::arg("workers") = 1);
  m.def("mean_infidelity", &mean_infidelity);
  m.def("check_rwa", [](const DriveParams& p, double threshold) {
    const RwaReport r = check_rwa(p, threshold);
    return py::dict(py::arg("passed") = r.pass, py::arg("ratio") = r.ratio,
                    py::arg("min_bound") = r.min_bound);
  }, py::arg("params"), py::arg("threshold") = 0.1);

  py::enum_<TextureKind>(m, "TextureKind")
      .value("neel_skyrmion", TextureKind::neel_skyrmion)
      .value("bloch_skyrmion", TextureKind::bloch_skyrmion)
      .value("anti_skyrmion", TextureKind::anti_skyrmion)
      .value("bimeron", TextureKind::bimeron)
      .value("meron", TextureKind::meron)
      .value("skyrmionium", TextureKind::skyrmionium)
      .value("domain_wall", TextureKind::domain_wall);

  py::class_<TextureSpec>(m, "TextureSpec")
      .def_static("make", &TextureSpec::make, py::arg("kind"), py::arg("helicity") = kPi / 2.0)
      .def_readwrite("drive_angle", &TextureSpec::drive_angle)
      .def_readwrite("helicity", &TextureSpec::helicity)
      .def_readonly("kind", &TextureSpec::kind);

  m.def("prepare_texture",
        [](const IonCrystal& c, const DriveParams& p, const TextureSpec& s, bool use_ode) {
          PrepareOptions o;
          o.use_ode = use_ode;
          return prepare_texture(c, p, s, o);
        },
        py::arg("crystal"), py::arg("params"), py::arg("spec"), py::arg("use_ode") = false);
  m.def("target_texture", &target_texture);

  m.def("winding_number", &winding_number);
  m.def("oriented_winding_number", &oriented_winding_number);
  m.def("winding_continuum", &winding_continuum);
  m.def("order_parameter", &order_parameter);
  m.def("mean_fidelity", [](const BlochField& f, const BlochField& t) { return mean_fidelity(f, t).mean; });
  m.def("fit_omega_r", [](py::array_t<double> t, py::array_t<double> q) {
    const auto s = pairs(t, q);
    const RateFit f = fit_omega_r(s);
    return py::make_tuple(f.omega_R, f.std_error);
  });
  m.def("fit_edge_width", [](py::array_t<double> r, py::array_t<double> p) {
    const auto s = pairs(r, p);
    const EdgeFit f = fit_edge_width(s);
    return py::dict(py::arg("width_10_90") = f.width_10_90, py::arg("std_error") = f.std_error,
                    py::arg("r0") = f.r0, py::arg("sigma") = f.sigma);
  });

  m.def("measure_and_reconstruct",
        [](const IonCrystal& c, const BlochField& field, const TextureSpec& spec, double psi,
           std::size_t n_shots, double epsilon, std::uint64_t seed, std::size_t n_radial,
           std::size_t n_azimuthal) {
          const ShotTriple shots = measure_field(field, n_shots, epsilon, seed);
          const BinnedAnalysis a =
              analyze_shots(c, shots, texture_target(spec, psi), n_radial, n_azimuthal);
          return py::dict(py::arg("Q") = a.report.Q,
                          py::arg("order_parameter") = std::abs(a.report.order_parameter),
                          py::arg("mean_fidelity") = a.report.mean_fidelity,
                          py::arg("bins") = a.binned.non_empty());
        },
        py::arg("crystal"), py::arg("field"), py::arg("spec"), py::arg("psi"),
        py::arg("n_shots") = 200, py::arg("epsilon") = 0.02, py::arg("seed") = 0,
        py::arg("n_radial") = 10, py::arg("n_azimuthal") = 22);

  m.def("domain_wall",
        [](const IonCrystal& c, const DriveParams& p, std::uint64_t seed, bool expectation) {
          DomainWallOptions o;
          o.mode = expectation ? RepumpMode::expectation : RepumpMode::bernoulli;
          return prepare_domain_wall(c, p, BeamParams{}, seed, o);
        },
        py::arg("crystal"), py::arg("params"), py::arg("seed") = 0, py::arg("expectation") = false);

  py::class_<NoiseParams>(m, "NoiseParams")
      .def(py::init([](double B, double f, double t0, double gamma) {
             return NoiseParams{B, f, t0, gamma};
           }),
           py::arg("B_nT"), py::arg("f_hz") = 100.0, py::arg("t0_s") = 0.0,
           py::arg("gamma") = kTwoPi * 28.0)
      .def_readwrite("B_nT", &NoiseParams::B_nT)
      .def_readwrite("f_hz", &NoiseParams::f_hz)
      .def_readwrite("t0_s", &NoiseParams::t0_s)
      .def_readwrite("gamma", &NoiseParams::gamma);
  m.def("spin_echo_phase", &spin_echo_phase);
  m.def("extract_phase", &extract_phase);
  m.def("echo_retention_closed_form", &echo_retention_closed_form);
  m.def("calibrate_amplitude", &calibrate_amplitude);
  m.def("fit_noise_model", [](py::array_t<double> T, py::array_t<double> phi, double gamma) {
    const auto s = pairs(T, phi);
    const NoiseFit f = fit_noise_model(s, gamma);
    return py::dict(py::arg("B_nT") = f.params.B_nT, py::arg("f_hz") = f.params.f_hz,
                    py::arg("t0_s") = f.params.t0_s, py::arg("residual_norm") = f.residual_norm);
  }, py::arg("T"), py::arg("phi"), py::arg("gamma") = kTwoPi * 28.0);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
