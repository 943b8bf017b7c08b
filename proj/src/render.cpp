// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "spintex/errors.hpp"

namespace spintex::render {

namespace {

constexpr double kSize = 480.0;  // plot area, px
constexpr double kMargin = 40.0;
constexpr double kBar = 70.0;    // color bar column

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else if (c == '&')
      out += "&amp;";
    else
      out += c;
  }
  return out;
}

struct Canvas {
  double scale;  // px per um
  double cx, cy;
  std::ostringstream body;

  explicit Canvas(double radius_um)
      : scale(kSize / (2.2 * radius_um)), cx(kMargin + kSize / 2), cy(kMargin + kSize / 2) {}
  double X(double x_um) const { return cx + x_um * scale; }
  double Y(double y_um) const { return cy - y_um * scale; }
};

std::string wrap(const Canvas& c, const std::string& title, const std::string& label) {
  const double w = kSize + 2 * kMargin + kBar, h = kSize + 2 * kMargin;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\">"
        "<path d=\"M0,6 L6,0\" stroke=\"#999\" stroke-width=\"1\"/></pattern></defs>\n";
  if (!title.empty())
    os << "<text x=\"" << num(kMargin) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
       << escape(title) << "</text>\n";
  os << c.body.str();
  // Color bar, fixed scale.
  const double bx = kMargin + kSize + 20, by = kMargin, bh = kSize;
  const int n = 50;
  for (int k = 0; k < n; ++k) {
    const double v = 1.0 - 2.0 * (k + 0.5) / n;
    os << "<rect x=\"" << num(bx) << "\" y=\"" << num(by + bh * k / n) << "\" width=\"16\" height=\""
       << num(bh / n + 0.5) << "\" fill=\"" << color_for(v) << "\"/>\n";
  }
  for (double v : {1.0, 0.0, -1.0})
    os << "<text x=\"" << num(bx + 20) << "\" y=\"" << num(by + bh * (1.0 - v) / 2.0 + 4)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << num(v) << "</text>\n";
  os << "<text x=\"" << num(bx) << "\" y=\"" << num(by + bh + 16)
     << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(label) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

int component(Style s) {
  switch (s) {
    case Style::heatmap_x: return 0;
    case Style::heatmap_y: return 1;
    default: return 2;
  }
}

void arrow(Canvas& c, double x, double y, double dx, double dy, double len_px,
           const std::string& color) {
  const double x0 = c.X(x), y0 = c.Y(y);
  const double x1 = x0 + dx * len_px, y1 = y0 - dy * len_px;
  const double xs = x0 - dx * len_px, ys = y0 + dy * len_px;
  c.body << "<line x1=\"" << num(xs) << "\" y1=\"" << num(ys) << "\" x2=\"" << num(x1)
         << "\" y2=\"" << num(y1) << "\" stroke=\"" << color << "\" stroke-width=\"1.6\"/>";
  const double L = std::hypot(dx, dy) * len_px;
  if (L > 1.5) {
    const double ux = (x1 - xs) / (2 * L), uy = (y1 - ys) / (2 * L);
    const double hl = std::min(5.0, 0.6 * L);
    c.body << "<polygon points=\"" << num(x1) << ',' << num(y1) << ' '
           << num(x1 - hl * ux + 0.5 * hl * uy) << ',' << num(y1 - hl * uy - 0.5 * hl * ux) << ' '
           << num(x1 - hl * ux - 0.5 * hl * uy) << ',' << num(y1 - hl * uy + 0.5 * hl * ux)
           << "\" fill=\"" << color << "\"/>";
  }
  c.body << '\n';
}

}  // namespace

Style style_from_string(const std::string& name) {
  if (name == "quiver") return Style::quiver;
  if (name == "heatmap-x") return Style::heatmap_x;
  if (name == "heatmap-y") return Style::heatmap_y;
  if (name == "heatmap-z") return Style::heatmap_z;
  throw InvalidParameter("unknown render style '" + name + "'");
}

std::string color_for(double value) {
  const double v = std::clamp(std::isfinite(value) ? value : 0.0, -1.0, 1.0);
  // white -> red for v > 0, white -> blue for v < 0
  const double a = std::abs(v);
  int r, g, b;
  if (v >= 0) {
    r = 255;
    g = static_cast<int>(std::lround(255 * (1 - a) + 30 * a));
    b = static_cast<int>(std::lround(255 * (1 - a) + 40 * a));
  } else {
    r = static_cast<int>(std::lround(255 * (1 - a) + 30 * a));
    g = static_cast<int>(std::lround(255 * (1 - a) + 70 * a));
    b = 255;
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string field_svg(const IonCrystal& crystal, const BlochField& field, Style style,
                      const std::string& title) {
  if (field.size() != crystal.size())
    throw InvalidParameter("field length does not match the crystal");
  Canvas c(crystal.radius());
  c.body << "<circle cx=\"" << num(c.cx) << "\" cy=\"" << num(c.cy) << "\" r=\""
         << num(crystal.radius() * c.scale * 1.05)
         << "\" fill=\"none\" stroke=\"#bbb\" stroke-dasharray=\"4,3\"/>\n";
  const double cell = std::max(2.0, 0.45 * crystal.spacing() * c.scale);
  const char* names = field.basis() == Basis::lab ? "xyz" : "XYZ";
  std::string label;
  for (std::size_t j = 0; j < crystal.size(); ++j) {
    const Vec3& u = field[j];
    const double x = crystal[j].x_um(), y = crystal[j].y_um();
    if (style == Style::quiver) {
      arrow(c, x, y, u.x(), u.y(), cell, color_for(u.z()));
    } else {
      c.body << "<circle cx=\"" << num(c.X(x)) << "\" cy=\"" << num(c.Y(y)) << "\" r=\""
             << num(cell) << "\" fill=\"" << color_for(u[component(style)]) << "\"/>\n";
    }
  }
  if (style == Style::quiver)
    label = std::string("hue: u") + names[2];
  else
    label = std::string("u") + names[component(style)];
  return wrap(c, title, label);
}

std::string binned_svg(const std::vector<io::BinnedRow>& rows, double radius_um, Style style,
                       const std::string& title) {
  if (rows.empty()) throw ParseError("binned input holds no records");
  if (!(radius_um > 0.0)) throw InvalidParameter("radius must be > 0");
  // Recover the grid from the distinct bin centres.
  std::set<double> radii;
  for (const auto& r : rows) radii.insert(r.r_center);
  const double dr = radius_um / static_cast<double>(radii.size());
  const double dphi = kTwoPi / static_cast<double>(std::max<std::size_t>(1, rows.size() / radii.size()));
  Canvas c(radius_um);
  for (const auto& r : rows) {
    const bool ok = std::isfinite(r.u.x()) && std::isfinite(r.u.y()) && std::isfinite(r.u.z());
    const double r0 = std::max(0.0, r.r_center - dr / 2), r1 = r.r_center + dr / 2;
    if (style == Style::quiver) {
      if (!ok) continue;
      const double x = r.r_center * std::cos(r.phi_center), y = r.r_center * std::sin(r.phi_center);
      arrow(c, x, y, r.u.x(), r.u.y(), 0.4 * dr * c.scale, color_for(r.u.z()));
      continue;
    }
    const double a0 = r.phi_center - dphi / 2, a1 = r.phi_center + dphi / 2;
    auto pt = [&](double rr, double a) {
      return num(c.X(rr * std::cos(a))) + "," + num(c.Y(rr * std::sin(a)));
    };
    const std::string fill = ok ? color_for(r.u[component(style)]) : "url(#hatch)";
    const double large = (a1 - a0) > kPi ? 1 : 0;
    c.body << "<path d=\"M" << pt(r0, a0) << " L" << pt(r1, a0) << " A" << num(r1 * c.scale) << ','
           << num(r1 * c.scale) << " 0 " << large << " 0 " << pt(r1, a1) << " L" << pt(r0, a1);
    if (r0 > 0)
      c.body << " A" << num(r0 * c.scale) << ',' << num(r0 * c.scale) << " 0 " << large << " 1 "
             << pt(r0, a0);
    c.body << " Z\" fill=\"" << fill << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
  }
  const std::string label =
      style == Style::quiver ? "hue: uz" : std::string("u") + "xyz"[component(style)];
  return wrap(c, title, label);
}

}  // namespace spintex::render
