#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "gridplan/errors.hpp"

namespace gridplan {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Twice the signed area of (a, b, c); positive when counter-clockwise.
inline long double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
         (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
}

/// Positive when `d` lies strictly inside the circumcircle of the
/// counter-clockwise triangle (a, b, c).
inline long double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const long double adx = static_cast<long double>(a.x) - d.x, ady = static_cast<long double>(a.y) - d.y;
  const long double bdx = static_cast<long double>(b.x) - d.x, bdy = static_cast<long double>(b.y) - d.y;
  const long double cdx = static_cast<long double>(c.x) - d.x, cdy = static_cast<long double>(c.y) - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

/// Edges (i < j) of a Delaunay triangulation of distinct points, sorted.
///
/// Incremental Bowyer-Watson inside an enclosing super-triangle. Points on a
/// circumcircle do not invalidate the triangle, so cocircular sets yield one
/// of the valid triangulations.
inline std::vector<std::pair<std::size_t, std::size_t>> delaunay_edges(std::span<const Point2> points) {
  const std::size_t n = points.size();
  if (n < 3) throw GeometryError("triangulation needs at least 3 points");
  {
    std::size_t far = 1;
    while (far < n && points[far].x == points[0].x && points[far].y == points[0].y) ++far;
    bool flat = true;
    for (std::size_t k = 1; k < n && far < n && flat; ++k)
      if (orient(points[0], points[far], points[k]) != 0.0L) flat = false;
    if (far == n || flat) throw GeometryError("points are collinear");
  }

  std::vector<Point2> pts(points.begin(), points.end());
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-9});
  const double cx = (min_x + max_x) / 2.0, cy = (min_y + max_y) / 2.0;
  const double big = 1e3 * span;
  pts.push_back({cx - big, cy - big});
  pts.push_back({cx + big, cy - big});
  pts.push_back({cx, cy + big});

  struct Tri {
    std::size_t a, b, c;
  };
  std::vector<Tri> tris{{n, n + 1, n + 2}};
  std::vector<Tri> kept;
  std::map<std::pair<std::size_t, std::size_t>, int> boundary;
  for (std::size_t p = 0; p < n; ++p) {
    kept.clear();
    boundary.clear();
    for (const auto& t : tris) {
      if (incircle(pts[t.a], pts[t.b], pts[t.c], pts[p]) > 0.0L) {
        for (auto [u, v] : {std::pair{t.a, t.b}, std::pair{t.b, t.c}, std::pair{t.c, t.a}})
          ++boundary[{std::min(u, v), std::max(u, v)}];
      } else {
        kept.push_back(t);
      }
    }
    for (const auto& [edge, uses] : boundary) {
      if (uses != 1) continue;
      Tri t{edge.first, edge.second, p};
      if (orient(pts[t.a], pts[t.b], pts[t.c]) < 0.0L) std::swap(t.a, t.b);
      kept.push_back(t);
    }
    tris.swap(kept);
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& t : tris) {
    if (t.a >= n || t.b >= n || t.c >= n) continue;
    for (auto [u, v] : {std::pair{t.a, t.b}, std::pair{t.b, t.c}, std::pair{t.c, t.a}})
      edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace gridplan
