// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "spintex/errors.hpp"
#include "spintex/rng.hpp"
#include "spintex/types.hpp"

namespace spintex {

namespace {

constexpr std::ptrdiff_t kNone = -1;

double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// > 0 when d lies strictly inside the circumcircle of counterclockwise abc.
double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

struct Tri {
  std::array<std::size_t, 3> v;
  std::array<std::ptrdiff_t, 3> n{kNone, kNone, kNone};  // n[i] across edge opposite v[i]
};

class Mesh {
 public:
  explicit Mesh(const std::vector<Point2>& p) : p_(p) {}

  void add(std::size_t a, std::size_t b, std::size_t c) {
    if (orient(p_[a], p_[b], p_[c]) < 0.0) std::swap(b, c);
    tris_.push_back({{a, b, c}});
  }

  void link() {
    std::unordered_map<std::uint64_t, std::pair<std::size_t, int>> edges;
    edges.reserve(tris_.size() * 3);
    auto key = [](std::size_t a, std::size_t b) {
      if (a > b) std::swap(a, b);
      return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
    };
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      for (int i = 0; i < 3; ++i) {
        const auto k = key(tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3]);
        auto [it, inserted] = edges.try_emplace(k, t, i);
        if (!inserted) {
          const auto [u, j] = it->second;
          tris_[t].n[i] = static_cast<std::ptrdiff_t>(u);
          tris_[u].n[j] = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
  }

  void make_delaunay() {
    std::vector<std::pair<std::size_t, int>> stack;
    for (std::size_t t = 0; t < tris_.size(); ++t)
      for (int i = 0; i < 3; ++i) stack.emplace_back(t, i);
    const std::size_t max_flips = 64 * tris_.size() * tris_.size() + 1024;
    std::size_t flips = 0;
    while (!stack.empty()) {
      auto [t, i] = stack.back();
      stack.pop_back();
      if (flip_if_illegal(t, i, stack) && ++flips > max_flips)
        throw TriangulationError("Delaunay edge flipping did not terminate");
    }
  }

  std::vector<std::array<std::size_t, 3>> triangles() const {
    std::vector<std::array<std::size_t, 3>> out;
    out.reserve(tris_.size());
    for (const auto& t : tris_) out.push_back(t.v);
    return out;
  }

 private:
  static int slot_of(const Tri& t, std::ptrdiff_t neighbour) {
    for (int k = 0; k < 3; ++k)
      if (t.n[k] == neighbour) return k;
    return -1;
  }

  void relink(std::ptrdiff_t tri, std::ptrdiff_t from, std::ptrdiff_t to) {
    if (tri == kNone) return;
    auto& t = tris_[static_cast<std::size_t>(tri)];
    const int k = slot_of(t, from);
    if (k >= 0) t.n[k] = to;
  }

  bool flip_if_illegal(std::size_t ti, int i,
                       std::vector<std::pair<std::size_t, int>>& stack) {
    const std::ptrdiff_t ui = tris_[ti].n[i];
    if (ui == kNone) return false;
    Tri t = tris_[ti];
    Tri u = tris_[static_cast<std::size_t>(ui)];
    const int j = slot_of(u, static_cast<std::ptrdiff_t>(ti));
    if (j < 0) throw TriangulationError("inconsistent triangle adjacency");

    const std::size_t a = t.v[i];
    const std::size_t b = t.v[(i + 1) % 3];
    const std::size_t c = t.v[(i + 2) % 3];
    const std::size_t d = u.v[j];
    if (incircle(p_[a], p_[b], p_[c], p_[d]) <= 0.0) return false;
    // The flipped pair must stay convex; otherwise the test is rounding noise.
    if (orient(p_[a], p_[b], p_[d]) <= 0.0 || orient(p_[a], p_[d], p_[c]) <= 0.0)
      return false;

    const std::ptrdiff_t n_ab = t.n[(i + 2) % 3];  // opposite c
    const std::ptrdiff_t n_ca = t.n[(i + 1) % 3];  // opposite b
    // In u = (.., c, b, d) the vertex order is rotated; find edges by vertex.
    std::ptrdiff_t n_bd = kNone, n_dc = kNone;
    for (int k = 0; k < 3; ++k) {
      if (u.v[k] == c) n_bd = u.n[k];
      if (u.v[k] == b) n_dc = u.n[k];
    }

    const auto tp = static_cast<std::ptrdiff_t>(ti);
    const auto up = ui;
    tris_[ti] = Tri{{a, b, d}, {n_bd, up, n_ab}};
    tris_[static_cast<std::size_t>(ui)] = Tri{{a, d, c}, {n_dc, n_ca, tp}};
    relink(n_bd, up, tp);
    relink(n_ca, tp, up);

    stack.emplace_back(ti, 0);
    stack.emplace_back(ti, 2);
    stack.emplace_back(static_cast<std::size_t>(ui), 0);
    stack.emplace_back(static_cast<std::size_t>(ui), 1);
    return true;
  }

  const std::vector<Point2>& p_;
  std::vector<Tri> tris_;
};

}  // namespace

Triangulation delaunay_triangulate(std::span<const Point2> input,
                                   const DelaunayOptions& options) {
  const std::size_t n = input.size();
  if (n < 3) throw TriangulationError("triangulation needs at least three points");

  std::vector<Point2> p(input.begin(), input.end());
  if (options.perturbation > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      auto eng = rng::make_engine(options.salt, 0x7e57ULL, i);
      const double ang = kTwoPi * rng::uniform01(eng);
      p[i] += options.perturbation * Point2(std::cos(ang), std::sin(ang));
    }
  }
  for (const auto& q : p)
    if (!q.allFinite()) throw TriangulationError("non-finite point coordinate");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (p[a].x() != p[b].x()) return p[a].x() < p[b].x();
    return p[a].y() < p[b].y();
  });
  for (std::size_t k = 1; k < n; ++k)
    if (p[order[k]] == p[order[k - 1]])
      throw TriangulationError("duplicate points " + std::to_string(order[k - 1]) +
                               " and " + std::to_string(order[k]));

  // Seed: the leading run of collinear points plus the first point off it.
  std::size_t k = 2;
  while (k < n && orient(p[order[0]], p[order[1]], p[order[k]]) == 0.0) ++k;
  if (k == n) throw TriangulationError("all points are collinear");

  Mesh mesh(p);
  std::vector<std::size_t> hull;
  const std::size_t apex = order[k];
  for (std::size_t i = 0; i + 1 < k; ++i) mesh.add(order[i], order[i + 1], apex);
  if (orient(p[order[0]], p[order[1]], p[apex]) > 0.0) {
    for (std::size_t i = 0; i < k; ++i) hull.push_back(order[i]);
    hull.push_back(apex);
  } else {
    hull.push_back(order[0]);
    hull.push_back(apex);
    for (std::size_t i = k - 1; i >= 1; --i) hull.push_back(order[i]);
  }

  for (std::size_t m = k + 1; m < n; ++m) {
    const std::size_t q = order[m];
    const std::size_t h = hull.size();
    std::vector<char> visible(h);
    bool any = false;
    for (std::size_t e = 0; e < h; ++e) {
      visible[e] = orient(p[hull[e]], p[hull[(e + 1) % h]], p[q]) < 0.0;
      any = any || visible[e];
    }
    if (!any) throw TriangulationError("point " + std::to_string(q) + " is not outside the hull");
    std::size_t start = 0;
    while (!(visible[start] && !visible[(start + h - 1) % h])) {
      if (++start == h) throw TriangulationError("hull is fully visible from point " + std::to_string(q));
    }
    std::size_t count = 0;
    while (visible[(start + count) % h]) {
      const std::size_t e = (start + count) % h;
      mesh.add(hull[(e + 1) % h], hull[e], q);
      ++count;
    }
    // Replace the count-1 interior vertices of the visible chain with q.
    std::vector<std::size_t> next;
    next.reserve(h - count + 2);
    for (std::size_t s = 0; s < h - count + 1; ++s)
      next.push_back(hull[(start + count + s) % h]);
    next.push_back(q);
    hull.swap(next);
  }

  mesh.link();
  mesh.make_delaunay();
  return {mesh.triangles(), hull};
}

}  // namespace spintex
