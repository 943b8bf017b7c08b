// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <regex>
#include <set>
#include <string>

#include "spintex/errors.hpp"
#include "spintex/render.hpp"
#include "support.hpp"

using namespace spintex;

namespace {

// Fill colors of the ion markers (filled circles).
std::vector<std::string> marker_fills(const std::string& svg) {
  static const std::regex re(R"re(<circle [^>]*fill="(#[0-9a-f]{6})")re");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
    out.push_back((*it)[1].str());
  return out;
}

}  // namespace

TEST_SUITE("render") {
  TEST_CASE("color scale") {
    CHECK(render::color_for(0.0) == "#ffffff");
    CHECK(render::color_for(2.0) == render::color_for(1.0));
    CHECK(render::color_for(NAN) == "#ffffff");
    int prev_red = 256, prev_blue = 256;
    for (double v : {0.1, 0.5, 0.9, 1.0}) {
      const std::string pos = render::color_for(v), neg = render::color_for(-v);
      CHECK(pos.substr(1, 2) == "ff");
      CHECK(neg.substr(5, 2) == "ff");
      const int g_pos = std::stoi(pos.substr(3, 2), nullptr, 16);
      const int r_neg = std::stoi(neg.substr(1, 2), nullptr, 16);
      CHECK(g_pos < prev_red);
      CHECK(r_neg < prev_blue);
      prev_red = g_pos;
      prev_blue = r_neg;
    }
  }

  TEST_CASE("uniform field renders one hue") {
    const IonCrystal& c = test::crystal160();
    const std::string svg = render::field_svg(c, BlochField::uniform(c.size(), Vec3(0, 0.6, 0.8)),
                                              render::Style::heatmap_z, "uniform");
    const auto fills = marker_fills(svg);
    CHECK(fills.size() == c.size());
    CHECK(std::set<std::string>(fills.begin(), fills.end()).size() == 1);
    CHECK(svg.find("uniform") != std::string::npos);
    CHECK(svg.rfind("</svg>") != std::string::npos);
  }

  TEST_CASE("dipole field renders antisymmetric colors") {
    const IonCrystal& c = test::crystal160();
    std::vector<Vec3> v;
    for (const auto& p : c.positions()) {
      const double z = p.x_um() / c.radius();
      v.emplace_back(0.0, std::sqrt(1.0 - z * z), z);
    }
    const auto fills = marker_fills(render::field_svg(c, BlochField(v), render::Style::heatmap_z));
    REQUIRE(fills.size() == c.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
      CHECK(fills[j] == render::color_for(v[j].z()));
      // Mirror image through the y axis carries the opposite value.
      for (std::size_t k = 0; k < c.size(); ++k)
        if (std::abs(c[k].x_um() + c[j].x_um()) < 1e-9 && std::abs(c[k].y_um() - c[j].y_um()) < 1e-9)
          CHECK(fills[k] == render::color_for(-v[j].z()));
    }
  }

  TEST_CASE("binned rendering") {
    CHECK_THROWS_AS(render::binned_svg({}, 150.0, render::Style::heatmap_x), ParseError);
    std::vector<io::BinnedRow> rows{{7.5, 0.1, Vec3(1, 1, 1), Vec3(1, 0, 0), 2},
                                    {22.5, 0.1, Vec3(NAN, NAN, NAN), Vec3(NAN, NAN, NAN), 0}};
    const std::string svg = render::binned_svg(rows, 150.0, render::Style::heatmap_x);
    CHECK(svg.find("url(#hatch)\"") != std::string::npos);
    CHECK(svg.find(render::color_for(1.0)) != std::string::npos);
  }

  TEST_CASE("style names") {
    CHECK(render::style_from_string("heatmap-y") == render::Style::heatmap_y);
    CHECK_THROWS_AS(render::style_from_string("contour"), InvalidParameter);
  }
}
