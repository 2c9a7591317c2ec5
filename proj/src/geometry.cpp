#include "stockpile/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include <fmt/core.h>

#include "stockpile/errors.hpp"

namespace stockpile {

namespace {

using Index = std::size_t;

double ring_signed_area(std::span<const Point2> ring) {
  // Shoelace over coordinates shifted to the first vertex to limit
  // cancellation for large grid offsets.
  if (ring.size() < 3) return 0.0;
  const Point2 o = ring[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
    twice += cross(o, ring[i], ring[i + 1]);
  }
  return 0.5 * twice;
}

// Intersection test for closed segments pq and rs, using raw signs.
bool segments_intersect(Point2 p, Point2 q, Point2 r, Point2 s) {
  auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
  auto on_segment = [](Point2 a, Point2 b, Point2 c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
  };
  const int d1 = sign(cross(r, s, p));
  const int d2 = sign(cross(r, s, q));
  const int d3 = sign(cross(p, q, r));
  const int d4 = sign(cross(p, q, s));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(r, s, p)) return true;
  if (d2 == 0 && on_segment(r, s, q)) return true;
  if (d3 == 0 && on_segment(p, q, r)) return true;
  if (d4 == 0 && on_segment(p, q, s)) return true;
  return false;
}

double point_segment_distance(Point2 q, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  if (len2 == 0.0) return distance(q, a);
  const Point2 aq = q - a;
  const double t = std::clamp((aq.x * ab.x + aq.y * ab.y) / len2, 0.0, 1.0);
  return distance(q, a + t * ab);
}

// +1 when d is inside the circle through CCW a, b, c; 0 within tolerance.
int incircle_sign(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad2 = adx * adx + ady * ady;
  const double bd2 = bdx * bdx + bdy * bdy;
  const double cd2 = cdx * cdx + cdy * cdy;
  const double det = ad2 * (bdx * cdy - cdx * bdy) - bd2 * (adx * cdy - cdx * ady) +
                     cd2 * (adx * bdy - bdx * ady);
  const double scale = std::max({ad2, bd2, cd2});
  const double tol = kPredicateEpsilon * scale * scale;
  if (det > tol) return 1;
  if (det < -tol) return -1;
  return 0;
}

// Drops vertices where the ring goes straight on and rotates the ring to start
// at its lexicographically smallest vertex.
std::vector<Point2> canonical_ring(std::vector<Point2> ring) {
  bool changed = true;
  while (changed && ring.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < ring.size() && ring.size() > 3; ++i) {
      const Point2 prev = ring[(i + ring.size() - 1) % ring.size()];
      const Point2 next = ring[(i + 1) % ring.size()];
      const Point2 in = ring[i] - prev;
      const Point2 out = next - ring[i];
      if (orientation(prev, ring[i], next) == Orientation::Collinear && in.x * out.x + in.y * out.y > 0.0) {
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  const auto first = std::min_element(ring.begin(), ring.end());
  std::rotate(ring.begin(), first, ring.end());
  return ring;
}

void require_non_degenerate(std::span<const Point2> canonical) {
  for (const Point2& p : canonical) {
    if (!is_finite(p)) throw DegenerateInput("non-finite coordinate in point set");
  }
  if (canonical.size() < 3) {
    throw DegenerateInput(
        fmt::format("need at least 3 distinct points, got {}", canonical.size()));
  }
}

std::vector<Point2> monotone_chain(std::span<const Point2> sorted) {
  // Andrew's monotone chain; pops on anything that is not a strict left turn.
  std::vector<Point2> hull(2 * sorted.size());
  std::size_t k = 0;
  for (const Point2& p : sorted) {
    while (k >= 2 && orientation(hull[k - 2], hull[k - 1], p) != Orientation::CounterClockwise) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = sorted.size() - 1; i-- > 0;) {
    const Point2& p = sorted[i];
    while (k >= lower && orientation(hull[k - 2], hull[k - 1], p) != Orientation::CounterClockwise) --k;
    hull[k++] = p;
  }
  hull.resize(k > 0 ? k - 1 : 0);
  return hull;
}

struct Mesh {
  struct Tri {
    std::array<Index, 3> v;
    // nbr[i] is the triangle across the edge opposite v[i], or npos.
    std::array<Index, 3> nbr;
  };
  static constexpr Index npos = static_cast<Index>(-1);

  const std::vector<Point2>& pts;
  std::vector<Tri> tris;

  explicit Mesh(const std::vector<Point2>& points) : pts(points) {}

  void add(Index a, Index b, Index c) { tris.push_back({{a, b, c}, {npos, npos, npos}}); }

  void link() {
    std::map<std::pair<Index, Index>, std::pair<Index, int>> edges;
    for (Index t = 0; t < tris.size(); ++t) {
      for (int i = 0; i < 3; ++i) {
        const Index u = tris[t].v[(i + 1) % 3];
        const Index w = tris[t].v[(i + 2) % 3];
        auto twin = edges.find({w, u});
        if (twin != edges.end()) {
          tris[t].nbr[i] = twin->second.first;
          tris[twin->second.first].nbr[twin->second.second] = t;
        } else {
          edges[{u, w}] = {t, i};
        }
      }
    }
  }

  int opposite_slot(Index t, int i) const {
    const Index n = tris[t].nbr[i];
    for (int j = 0; j < 3; ++j) {
      if (tris[n].nbr[j] == t) return j;
    }
    return -1;
  }

  void retarget(Index tri, Index from, Index to) {
    if (tri == npos) return;
    for (auto& n : tris[tri].nbr) {
      if (n == from) n = to;
    }
  }

  // Lawson edge flipping until every interior edge is locally Delaunay.
  void legalize() {
    std::vector<std::pair<Index, int>> stack;
    for (Index t = 0; t < tris.size(); ++t) {
      for (int i = 0; i < 3; ++i) stack.emplace_back(t, i);
    }
    std::size_t budget = 64 * tris.size() * tris.size() + 1024;
    while (!stack.empty() && budget-- > 0) {
      const auto [t, i] = stack.back();
      stack.pop_back();
      const Index n = tris[t].nbr[i];
      if (n == npos) continue;
      const int j = opposite_slot(t, i);
      const Index a = tris[t].v[i];
      const Index b = tris[t].v[(i + 1) % 3];
      const Index c = tris[t].v[(i + 2) % 3];
      const Index d = tris[n].v[j];
      // Cocircular quads keep the diagonal touching the lowest index, as if
      // lower indices were lifted slightly below the paraboloid.
      const int sign = incircle_sign(pts[a], pts[b], pts[c], pts[d]);
      if (sign < 0) continue;
      if (sign == 0 && std::min(a, d) > std::min(b, c)) continue;
      if (orientation(pts[a], pts[b], pts[d]) != Orientation::CounterClockwise ||
          orientation(pts[a], pts[d], pts[c]) != Orientation::CounterClockwise) {
        continue;
      }
      const Index t_ca = tris[t].nbr[(i + 1) % 3];
      const Index t_ab = tris[t].nbr[(i + 2) % 3];
      const Index n_bd = tris[n].nbr[(j + 1) % 3];
      const Index n_dc = tris[n].nbr[(j + 2) % 3];
      // t becomes (a, b, d); n becomes (a, d, c).
      tris[t] = {{a, b, d}, {n_bd, n, t_ab}};
      tris[n] = {{a, d, c}, {n_dc, t_ca, t}};
      retarget(n_bd, n, t);
      retarget(t_ca, t, n);
      stack.emplace_back(t, 0);
      stack.emplace_back(t, 2);
      stack.emplace_back(n, 0);
      stack.emplace_back(n, 1);
    }
  }
};

// Sweep triangulation over lexicographically sorted points: every new point
// lies outside the current hull and is joined to its visible hull edges.
Mesh sweep_triangulation(const std::vector<Point2>& pts) {
  Mesh mesh(pts);
  std::size_t k = 2;
  while (k < pts.size() && orientation(pts[0], pts[1], pts[k]) == Orientation::Collinear) ++k;
  if (k == pts.size()) throw DegenerateInput("all points are collinear");

  std::vector<Index> hull;
  if (orientation(pts[0], pts[1], pts[k]) == Orientation::CounterClockwise) {
    for (Index i = 0; i + 1 < k; ++i) mesh.add(i, i + 1, k);
    for (Index i = 0; i <= k; ++i) hull.push_back(i);
  } else {
    for (Index i = 0; i + 1 < k; ++i) mesh.add(i + 1, i, k);
    hull.push_back(0);
    hull.push_back(k);
    for (Index i = k - 1; i >= 1; --i) hull.push_back(i);
  }

  for (Index p = k + 1; p < pts.size(); ++p) {
    const std::size_t h = hull.size();
    std::vector<char> visible(h);
    bool any = false;
    for (std::size_t e = 0; e < h; ++e) {
      visible[e] = orientation(pts[hull[e]], pts[hull[(e + 1) % h]], pts[p]) ==
                   Orientation::Clockwise;
      any = any || visible[e];
    }
    if (!any) {
      // Tolerance hid every edge; fall back to the most clearly visible one.
      std::size_t best = 0;
      double best_det = 0.0;
      for (std::size_t e = 0; e < h; ++e) {
        const double det = cross(pts[hull[e]], pts[hull[(e + 1) % h]], pts[p]);
        if (det < best_det) {
          best_det = det;
          best = e;
        }
      }
      if (best_det >= 0.0) continue;
      visible[best] = 1;
    }
    std::size_t start = 0;
    while (!(visible[start] && !visible[(start + h - 1) % h])) ++start;
    std::size_t count = 0;
    while (count < h && visible[(start + count) % h]) {
      const Index a = hull[(start + count) % h];
      const Index b = hull[(start + count + 1) % h];
      mesh.add(a, p, b);
      ++count;
    }
    // Replace the interior vertices of the visible chain by p.
    std::vector<Index> next;
    next.reserve(h + 1);
    for (std::size_t s = 0; s <= h - count; ++s) {
      next.push_back(hull[(start + count + s) % h]);
    }
    next.push_back(p);
    hull = std::move(next);
  }
  mesh.link();
  return mesh;
}

double clockwise_turn(Point2 from_dir, Point2 to_dir) {
  double angle = std::atan2(from_dir.y, from_dir.x) - std::atan2(to_dir.y, to_dir.x);
  while (angle <= 0.0) angle += 2.0 * std::numbers::pi;
  while (angle > 2.0 * std::numbers::pi) angle -= 2.0 * std::numbers::pi;
  return angle;
}

// A point just left of the first edge of a CCW ring, i.e. inside it.
Point2 interior_probe(const Polygon& ring) {
  const Point2 a = ring[0];
  const Point2 b = ring[1];
  const Point2 mid = 0.5 * (a + b);
  const Point2 dir = b - a;
  return mid + 1e-6 * Point2{-dir.y, dir.x};
}

}  // namespace

bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double squared_distance(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double cross(Point2 a, Point2 b, Point2 c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

Orientation orientation(Point2 a, Point2 b, Point2 c) {
  const double det = cross(a, b, c);
  const double scale = distance(a, b) * distance(a, c);
  if (scale == 0.0 || std::abs(det) <= kPredicateEpsilon * scale) return Orientation::Collinear;
  return det > 0.0 ? Orientation::CounterClockwise : Orientation::Clockwise;
}

bool in_circumcircle(Point2 a, Point2 b, Point2 c, Point2 d) { return incircle_sign(a, b, c, d) > 0; }

std::vector<Point2> canonical_points(std::span<const Point2> points) {
  std::vector<Point2> out(points.begin(), points.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_degenerate(std::span<const Point2> points) {
  const auto pts = canonical_points(points);
  if (pts.size() < 3) return true;
  for (const Point2& p : pts) {
    if (!is_finite(p)) return true;
  }
  return monotone_chain(pts).size() < 3;
}

Polygon::Polygon(std::vector<Point2> ccw_ring) : ring_(std::move(ccw_ring)) {
  const std::size_t n = ring_.size();
  if (n < 3) throw InvalidPolygon(fmt::format("ring has {} vertices, need 3", n));
  for (const Point2& p : ring_) {
    if (!is_finite(p)) throw InvalidPolygon("ring has a non-finite vertex");
  }
  if (canonical_points(ring_).size() != n) throw InvalidPolygon("ring repeats a vertex");
  if (!(ring_signed_area(ring_) > 0.0)) throw InvalidPolygon("ring is not counter-clockwise");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(ring_[i], ring_[(i + 1) % n], ring_[j], ring_[(j + 1) % n])) {
        throw InvalidPolygon("ring self-intersects");
      }
    }
  }
}

double Polygon::area() const { return ring_signed_area(ring_); }

double MultiPolygon::area() const {
  double total = 0.0;
  for (const Polygon& p : parts) total += p.area();
  return total;
}

AlphaParam AlphaParam::meters(double alpha) {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw ConfigError(fmt::format("alpha must be a finite length with alpha > 0 metres (got {})", alpha));
  }
  AlphaParam param;
  param.value_ = alpha;
  return param;
}

Polygon convex_hull(std::span<const Point2> points) {
  const auto pts = canonical_points(points);
  require_non_degenerate(pts);
  auto hull = monotone_chain(pts);
  if (hull.size() < 3) throw DegenerateInput("all points are collinear");
  return Polygon(std::move(hull));
}

Triangulation delaunay(std::span<const Point2> points) {
  Triangulation out;
  out.points = canonical_points(points);
  require_non_degenerate(out.points);
  Mesh mesh = sweep_triangulation(out.points);
  mesh.legalize();
  out.triangles.reserve(mesh.tris.size());
  for (const auto& t : mesh.tris) {
    std::array<Index, 3> v = t.v;
    std::rotate(v.begin(), std::min_element(v.begin(), v.end()), v.end());
    out.triangles.push_back(v);
  }
  std::sort(out.triangles.begin(), out.triangles.end());
  return out;
}

std::vector<Triangle> delaunay_triangulate(std::span<const Point2> points) {
  const Triangulation dt = delaunay(points);
  std::vector<Triangle> out;
  out.reserve(dt.triangles.size());
  for (const auto& t : dt.triangles) {
    out.push_back({dt.points[t[0]], dt.points[t[1]], dt.points[t[2]]});
  }
  return out;
}

MultiPolygon alpha_shape(std::span<const Point2> points, AlphaParam alpha) {
  const Triangulation dt = delaunay(points);
  const auto& pts = dt.points;

  // Directed edges of the kept triangles; an edge whose reverse is absent
  // lies on the union boundary.
  std::map<std::pair<Index, Index>, bool> directed;  // value: consumed
  for (const auto& t : dt.triangles) {
    const bool keep = alpha.admits(distance(pts[t[0]], pts[t[1]])) &&
                      alpha.admits(distance(pts[t[1]], pts[t[2]])) &&
                      alpha.admits(distance(pts[t[2]], pts[t[0]]));
    if (!keep) continue;
    for (int i = 0; i < 3; ++i) directed[{t[i], t[(i + 1) % 3]}] = false;
  }
  std::map<std::pair<Index, Index>, bool> boundary;
  std::multimap<Index, Index> outgoing;
  for (const auto& [edge, unused] : directed) {
    if (directed.count({edge.second, edge.first}) == 0) {
      boundary[edge] = false;
      outgoing.emplace(edge.first, edge.second);
    }
  }

  std::vector<Polygon> exteriors;
  for (auto& [start_edge, used] : boundary) {
    if (used) continue;
    used = true;
    const Index origin = start_edge.first;
    std::vector<Index> loop{origin};
    Index prev = origin;
    Index cur = start_edge.second;
    for (;;) {
      // Leave cur by the outgoing edge making the sharpest clockwise turn from
      // the way we came in, which keeps pinched components apart.
      const Point2 back = pts[prev] - pts[cur];
      Index best = Mesh::npos;
      double best_turn = 0.0;
      auto [lo, hi] = outgoing.equal_range(cur);
      for (auto it = lo; it != hi; ++it) {
        const std::pair<Index, Index> e{cur, it->second};
        const bool is_start = e == start_edge;
        if (boundary[e] && !is_start) continue;
        const double turn = clockwise_turn(back, pts[it->second] - pts[cur]);
        if (best == Mesh::npos || turn < best_turn) {
          best = it->second;
          best_turn = turn;
        }
      }
      if (best == Mesh::npos) break;
      if (std::pair<Index, Index>{cur, best} == start_edge) break;
      boundary[{cur, best}] = true;
      loop.push_back(cur);
      prev = cur;
      cur = best;
    }

    // A boundary that touches itself is cut into simple loops at the repeat.
    std::vector<Index> stack;
    std::map<Index, std::size_t> position;
    auto emit = [&](std::size_t from) {
      std::vector<Point2> ring;
      for (std::size_t k = from; k < stack.size(); ++k) ring.push_back(pts[stack[k]]);
      if (ring.size() < 3 || !(ring_signed_area(ring) > 0.0)) return;  // hole or sliver
      exteriors.emplace_back(canonical_ring(std::move(ring)));
    };
    for (Index v : loop) {
      if (auto it = position.find(v); it != position.end()) {
        const std::size_t at = it->second;
        emit(at);
        for (std::size_t k = at + 1; k < stack.size(); ++k) position.erase(stack[k]);
        stack.resize(at + 1);
        continue;
      }
      position[v] = stack.size();
      stack.push_back(v);
    }
    emit(0);
  }

  // Components sitting inside a filled hole of a larger part are absorbed.
  std::vector<Polygon> parts;
  for (std::size_t i = 0; i < exteriors.size(); ++i) {
    const Point2 probe = interior_probe(exteriors[i]);
    bool nested = false;
    for (std::size_t j = 0; j < exteriors.size() && !nested; ++j) {
      nested = j != i && exteriors[j].area() > exteriors[i].area() &&
               point_in_polygon(probe, exteriors[j]) != Location::Outside;
    }
    if (!nested) parts.push_back(exteriors[i]);
  }
  std::sort(parts.begin(), parts.end(), [](const Polygon& a, const Polygon& b) {
    return a[0] < b[0];
  });
  return MultiPolygon{std::move(parts)};
}

double polygon_area(const Polygon& polygon) { return polygon.area(); }

Location point_in_polygon(Point2 q, const Polygon& polygon) {
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(q, polygon[i], polygon[(i + 1) % n]) <= kBoundaryTolerance) {
      return Location::Boundary;
    }
  }
  // Winding number.
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = polygon[i];
    const Point2 b = polygon[(i + 1) % n];
    if (a.y <= q.y) {
      if (b.y > q.y && cross(a, b, q) > 0.0) ++winding;
    } else if (b.y <= q.y && cross(a, b, q) < 0.0) {
      --winding;
    }
  }
  return winding != 0 ? Location::Inside : Location::Outside;
}

bool covers(const MultiPolygon& shape, Point2 q) {
  return std::any_of(shape.parts.begin(), shape.parts.end(), [q](const Polygon& p) {
    return point_in_polygon(q, p) != Location::Outside;
  });
}

bool is_convex(const Polygon& polygon) {
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (orientation(polygon[i], polygon[(i + 1) % n], polygon[(i + 2) % n]) ==
        Orientation::Clockwise) {
      return false;
    }
  }
  return true;
}

double convex_intersection_area(const Polygon& a, const Polygon& b) {
  if (!is_convex(a) || !is_convex(b)) throw NotConvex("convex_intersection_area needs convex input");
  // Sutherland-Hodgman: clip a against each (CCW) edge of b.
  std::vector<Point2> clipped(a.vertices().begin(), a.vertices().end());
  const std::size_t m = b.size();
  for (std::size_t e = 0; e < m && !clipped.empty(); ++e) {
    const Point2 p = b[e];
    const Point2 q = b[(e + 1) % m];
    std::vector<Point2> next;
    for (std::size_t i = 0; i < clipped.size(); ++i) {
      const Point2 cur = clipped[i];
      const Point2 nxt = clipped[(i + 1) % clipped.size()];
      const double dc = cross(p, q, cur);
      const double dn = cross(p, q, nxt);
      if (dc >= 0.0) next.push_back(cur);
      if ((dc >= 0.0) != (dn >= 0.0)) {
        const double t = dc / (dc - dn);
        next.push_back(cur + t * (nxt - cur));
      }
    }
    clipped = std::move(next);
  }
  return std::max(0.0, ring_signed_area(clipped));
}

}  // namespace stockpile
