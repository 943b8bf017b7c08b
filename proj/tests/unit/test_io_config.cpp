// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spintex/config.hpp"
#include "spintex/errors.hpp"
#include "spintex/io.hpp"
#include "spintex/pipeline.hpp"
#include "spintex/protocols.hpp"
#include "support.hpp"

using namespace spintex;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "spintex_unit_io";
  fs::create_directories(dir);
  return dir / name;
}

BlochField sample_field() {
  return target_texture(test::crystal160(), TextureSpec::make(TextureKind::meron), 0.4);
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("doubles survive text") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 150.0, 6.02214076e23})
      CHECK(std::stod(io::format_double(v)) == v);
    CHECK(io::format_double(NAN) == "nan");
  }

  TEST_CASE("crystal round trip") {
    const IonCrystal& c = test::crystal160();
    CHECK(io::crystal_from_json(io::crystal_to_json(c)) == c);
    CHECK_THROWS_AS(io::crystal_from_json("{not json"), ParseError);
    CHECK_THROWS_AS(io::crystal_from_json(R"({"R_um": 1})"), ParseError);
  }

  TEST_CASE("field round trip keeps the basis") {
    for (const BlochField& f : {sample_field(), to_rotated_basis(sample_field())}) {
      std::stringstream ss;
      io::write_field_csv(ss, f);
      CHECK(io::read_field_csv(ss) == f);
    }
  }

  TEST_CASE("field parse errors name the line") {
    std::stringstream bad("# basis: lab\nid,ux,uy,uz\n0,1,0,0\n1,0.5,abc,0\n");
    try {
      io::read_field_csv(bad);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    std::stringstream empty("# basis: lab\nid,ux,uy,uz\n");
    CHECK_THROWS_AS(io::read_field_csv(empty), ParseError);
    std::stringstream too_long("id,ux,uy,uz\n0,2,0,0\n");
    CHECK_THROWS_AS(io::read_field_csv(too_long), Error);
  }

  TEST_CASE("shot records, text and binary") {
    const ShotTriple s = measure_field(sample_field(), 7, 0.02, 9);
    std::stringstream ss;
    io::write_shots_csv(ss, s[1]);
    CHECK(io::read_shots_csv(ss) == s[1]);
    const fs::path p = scratch("shots.bin");
    io::write_shots_binary(p, s[2]);
    CHECK(io::read_shots_binary(p) == s[2]);
    CHECK_THROWS_AS(io::read_shots_binary(scratch("missing.bin")), IoError);
  }

  TEST_CASE("binned rows") {
    const IonCrystal& c = test::crystal160();
    const BinnedField b = reconstruct_bloch(bin_polar(c, measure_field(sample_field(), 50, 0.0, 1)));
    std::stringstream ss;
    io::write_binned_csv(ss, b);
    const auto rows = io::read_binned_csv(ss);
    REQUIRE(rows.size() == b.bins.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].n_ions == b.bins[i].n_ions);
      if (b.bins[i].empty())
        CHECK(std::isnan(rows[i].u.x()));
      else
        CHECK((rows[i].u - b.bins[i].u).norm() == 0.0);
    }
  }

  TEST_CASE("report json") {
    DiagnosticsReport r;
    r.Q = -0.99;
    r.order_parameter = {0.1, -0.2};
    const auto j = nlohmann::json::parse(io::report_to_json(r));
    CHECK(j.at("Q").get<double>() == -0.99);
  }

  TEST_CASE("file errors") {
    CHECK_THROWS_AS(io::read_text(scratch("nope.txt")), IoError);
    const fs::path p = scratch("hello.txt");
    io::write_text(p, "hi\n");
    CHECK(io::read_text(p) == "hi\n");
  }
}

TEST_SUITE("config") {
  TEST_CASE("defaults round trip") {
    const ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    const std::string text = config_to_json(c);
    CHECK(config_to_json(config_from_json(text)) == text);
  }

  TEST_CASE("partial files merge onto defaults") {
    const ExperimentConfig c =
        config_from_json(R"({"schema_version": 1, "measurement": {"n_shots": 50}})");
    CHECK(c.measurement.n_shots == 50);
    CHECK(c.measurement.epsilon == 0.02);
    CHECK(c.crystal.n_ions == 160);
  }

  TEST_CASE("rejections") {
    CHECK_THROWS_AS(config_from_json(R"({"measurement": {}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"schema_version": 2})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"schema_version": 1, "measurment": {}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"schema_version": 1, "beam": {"waist": 3}})"),
                    ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"schema_version": 1, "beam": {"waist_um": "x"}})"),
                    ConfigError);
    CHECK_THROWS_AS(config_from_json("[1, 2"), ConfigError);
    try {
      config_from_json(R"({"schema_version": 1, "measurement": {"epsilon": 0.7}})");
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("measurement.epsilon") != std::string::npos);
    }
  }

  TEST_CASE("overrides") {
    const ExperimentConfig c = apply_overrides(
        ExperimentConfig{}, {"measurement.n_shots=31", "texture.kind=meron", "noise.f_hz=90.5"});
    CHECK(c.measurement.n_shots == 31);
    CHECK(c.texture.kind == "meron");
    CHECK(c.noise.f_hz == 90.5);
    CHECK(c.texture_spec().kind == TextureKind::meron);
    CHECK_THROWS_AS(apply_overrides(ExperimentConfig{}, {"measurement.nshots=3"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(ExperimentConfig{}, {"measurement=3"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(ExperimentConfig{}, {"novalue"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(ExperimentConfig{}, {"texture.kind=vortex"}), ConfigError);
  }

  TEST_CASE("derived objects") {
    ExperimentConfig c;
    const IonCrystal crystal = c.make_crystal();
    CHECK(crystal.size() >= 150);
    CHECK(crystal.size() <= 170);
    const DriveParams p = c.drive_params(crystal.radius());
    CHECK_NOTHROW(p.validate());
    CHECK(p.omega_R == doctest::Approx(kTwoPi * 1.56e3));
    CHECK(p.mu_r == doctest::Approx(kTwoPi * 103e3));
    c.crystal.spacing_um = 400.0;
    CHECK(c.make_crystal().size() == 1);
    ExperimentConfig a, b;
    set_master_seed(a, 5);
    set_master_seed(b, 5);
    CHECK(config_to_json(a) == config_to_json(b));
    set_master_seed(b, 6);
    CHECK(a.measurement.seed != b.measurement.seed);
  }
}
