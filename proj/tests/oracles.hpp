#pragma once

// Brute-force reference implementations used only by the tests. They share no
// code paths with the library beyond the Point2 type (and, for the alpha
// oracle, the triangulation it filters).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "stockpile/clustering.hpp"
#include "stockpile/geometry.hpp"

namespace oracle {

using stockpile::Point2;

inline double orient(Point2 a, Point2 b, Point2 c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

inline bool in_closed_triangle(Point2 p, Point2 a, Point2 b, Point2 c) {
  double d1 = orient(a, b, p), d2 = orient(b, c, p), d3 = orient(c, a, p);
  const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(has_neg && has_pos);
}

inline bool on_closed_segment(Point2 p, Point2 a, Point2 b) {
  return orient(a, b, p) == 0.0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// A distinct point is a strict hull vertex iff it lies in no closed triangle
// and on no closed segment spanned by other points.
inline std::set<Point2> hull_vertices(const std::vector<Point2>& input) {
  std::vector<Point2> pts(input);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  std::set<Point2> out;
  for (std::size_t p = 0; p < n; ++p) {
    bool covered = false;
    for (std::size_t i = 0; i < n && !covered; ++i) {
      if (i == p) continue;
      for (std::size_t j = i + 1; j < n && !covered; ++j) {
        if (j == p) continue;
        if (on_closed_segment(pts[p], pts[i], pts[j])) covered = true;
        for (std::size_t k = j + 1; k < n && !covered; ++k) {
          if (k == p) continue;
          if (orient(pts[i], pts[j], pts[k]) == 0.0) continue;
          covered = in_closed_triangle(pts[p], pts[i], pts[j], pts[k]);
        }
      }
    }
    if (!covered) out.insert(pts[p]);
  }
  return out;
}

// Circumcentre route, independent of the library's determinant predicate.
// Reports d strictly inside by more than a relative 1e-9 of the radius.
inline bool strictly_inside_circumcircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double den = 2.0 * (bx * cy - by * cx);
  const double ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / den;
  const double uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / den;
  const double r = std::hypot(ux, uy);
  const double dist = std::hypot(d.x - a.x - ux, d.y - a.y - uy);
  return dist < r * (1.0 - 1e-9);
}

inline double triangle_area(Point2 a, Point2 b, Point2 c) { return 0.5 * std::abs(orient(a, b, c)); }

// Labels from the full distance matrix: union-find over core pairs, then each
// border point joins the adjacent cluster whose smallest core point is
// lexicographically smallest.
inline std::vector<std::int32_t> dbscan(const std::vector<Point2>& pts, double eps, std::size_t min_pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n));
  std::vector<char> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
      adj[i][j] = dx * dx + dy * dy <= eps * eps;
      count += adj[i][j];
    }
    core[i] = count >= min_pts;
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (core[i] && core[j] && adj[i][j]) parent[find(i)] = find(j);
    }
  }
  // Rank components by their smallest core point (index breaks exact ties).
  std::map<std::size_t, std::pair<Point2, std::size_t>> smallest;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    const auto key = std::make_pair(pts[i], i);
    auto [it, fresh] = smallest.try_emplace(find(i), key);
    if (!fresh && key < it->second) it->second = key;
  }
  std::vector<std::pair<std::pair<Point2, std::size_t>, std::size_t>> order;
  for (const auto& [root, key] : smallest) order.push_back({key, root});
  std::sort(order.begin(), order.end());
  std::map<std::size_t, std::int32_t> id;
  for (std::size_t r = 0; r < order.size(); ++r) id[order[r].second] = static_cast<std::int32_t>(r);

  std::vector<std::int32_t> labels(n, stockpile::kNoise);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      labels[i] = id[find(i)];
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (core[j] && adj[i][j]) {
        const auto c = id[find(j)];
        if (labels[i] == stockpile::kNoise || c < labels[i]) labels[i] = c;
      }
    }
  }
  return labels;
}

inline std::set<std::set<std::size_t>> partition(const std::vector<std::int32_t>& labels) {
  std::map<std::int32_t, std::set<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].insert(i);
  std::set<std::set<std::size_t>> out;
  for (auto& [label, members] : groups) out.insert(members);
  return out;
}

struct AlphaOracle {
  std::size_t components = 0;  // kept triangles connected through shared edges
  double area = 0.0;           // sum of kept triangle areas (holes not filled)
};

// Edge-length filter over the library triangulation, then union by shared-edge
// adjacency.
inline AlphaOracle alpha_union(const std::vector<Point2>& pts, double alpha) {
  const auto dt = stockpile::delaunay(pts);
  const auto& p = dt.points;
  auto len = [&](std::size_t a, std::size_t b) { return std::hypot(p[a].x - p[b].x, p[a].y - p[b].y); };
  std::vector<std::array<std::size_t, 3>> kept;
  for (const auto& t : dt.triangles) {
    if (len(t[0], t[1]) <= alpha && len(t[1], t[2]) <= alpha && len(t[2], t[0]) <= alpha) kept.push_back(t);
  }
  AlphaOracle out;
  std::vector<std::size_t> parent(kept.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_owner;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto& t = kept[k];
    out.area += triangle_area(p[t[0]], p[t[1]], p[t[2]]);
    for (int i = 0; i < 3; ++i) {
      auto e = std::minmax(t[i], t[(i + 1) % 3]);
      auto [it, fresh] = edge_owner.try_emplace({e.first, e.second}, k);
      if (!fresh) parent[find(k)] = find(it->second);
    }
  }
  std::set<std::size_t> roots;
  for (std::size_t k = 0; k < kept.size(); ++k) roots.insert(find(k));
  out.components = roots.size();
  return out;
}

// Even-odd ray casting.
inline bool ray_cast_inside(Point2 q, const stockpile::Polygon& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = poly[i], b = poly[j];
    if ((a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

// Union area of polygons on a square grid: a cell counts when its centre is
// inside any polygon.
inline double raster_union_area(const std::vector<stockpile::Polygon>& polys, double cell, Point2 lo, Point2 hi) {
  std::size_t hits = 0;
  for (double x = lo.x + 0.5 * cell; x < hi.x; x += cell) {
    for (double y = lo.y + 0.5 * cell; y < hi.y; y += cell) {
      for (const auto& poly : polys) {
        if (ray_cast_inside({x, y}, poly)) {
          ++hits;
          break;
        }
      }
    }
  }
  return static_cast<double>(hits) * cell * cell;
}

}  // namespace oracle
