#pragma once

// Planar geometry kernel: hulls, Delaunay triangulation, alpha shapes,
// containment and areas. Coordinates are metres in a projected local grid.

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace stockpile {

// Distance under which a point counts as lying on a polygon edge.
inline constexpr double kBoundaryTolerance = 1e-9;
// Threshold applied to scale-normalised orientation / in-circle determinants.
inline constexpr double kPredicateEpsilon = 1e-12;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend auto operator<=>(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

bool is_finite(Point2 p);
double distance(Point2 a, Point2 b);
double squared_distance(Point2 a, Point2 b);

// Raw orientation determinant (b - a) x (c - a); positive for a left turn.
double cross(Point2 a, Point2 b, Point2 c);

enum class Orientation { Clockwise, Collinear, CounterClockwise };

// Sign of cross(a, b, c) after dividing by |b - a| * |c - a|. Values within
// kPredicateEpsilon of zero are reported as Collinear.
Orientation orientation(Point2 a, Point2 b, Point2 c);

// True when d lies strictly inside the circumcircle of the CCW triangle abc.
bool in_circumcircle(Point2 a, Point2 b, Point2 c, Point2 d);

// Sorted (lexicographic x, then y) copy with exact duplicates removed.
std::vector<Point2> canonical_points(std::span<const Point2> points);

// Fewer than three distinct points, or every point on one line.
bool is_degenerate(std::span<const Point2> points);

// Simple, counter-clockwise ring of at least three distinct vertices. Closure
// is implicit; the first vertex is not repeated.
class Polygon {
 public:
  // Throws InvalidPolygon when the ring breaks any of the invariants.
  explicit Polygon(std::vector<Point2> ccw_ring);

  std::span<const Point2> vertices() const { return ring_; }
  std::size_t size() const { return ring_.size(); }
  const Point2& operator[](std::size_t i) const { return ring_[i]; }
  double area() const;

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<Point2> ring_;
};

// Interior-disjoint polygons; an empty part list is a valid (empty) shape.
struct MultiPolygon {
  std::vector<Polygon> parts;

  bool empty() const { return parts.empty(); }
  double area() const;

  friend bool operator==(const MultiPolygon&, const MultiPolygon&) = default;
};

struct Triangle {
  Point2 a;
  Point2 b;
  Point2 c;

  friend bool operator==(const Triangle&, const Triangle&) = default;
};

// Index form of a Delaunay triangulation over canonical_points(input).
struct Triangulation {
  std::vector<Point2> points;
  std::vector<std::array<std::size_t, 3>> triangles;  // CCW vertex indices
};

// Maximum admissible triangle edge length for alpha shapes, or infinite.
class AlphaParam {
 public:
  // Throws ConfigError unless alpha is finite and > 0.
  static AlphaParam meters(double alpha);
  static AlphaParam infinite() { return AlphaParam{}; }

  bool is_infinite() const { return !value_.has_value(); }
  // Only meaningful when !is_infinite().
  double value() const { return value_.value_or(0.0); }
  bool admits(double edge_length) const { return is_infinite() || edge_length <= *value_; }

  friend bool operator==(const AlphaParam&, const AlphaParam&) = default;

 private:
  AlphaParam() = default;
  std::optional<double> value_;
};

// Strict convex hull (collinear boundary points dropped), CCW, starting at the
// lexicographically smallest vertex. Throws DegenerateInput.
Polygon convex_hull(std::span<const Point2> points);

// Throws DegenerateInput.
Triangulation delaunay(std::span<const Point2> points);
std::vector<Triangle> delaunay_triangulate(std::span<const Point2> points);

// Union of the Delaunay triangles whose three edges are all <= alpha. Holes are
// filled; an empty result means every triangle was filtered out.
// Throws DegenerateInput.
MultiPolygon alpha_shape(std::span<const Point2> points, AlphaParam alpha);

double polygon_area(const Polygon& polygon);

enum class Location { Inside, Boundary, Outside };

Location point_in_polygon(Point2 q, const Polygon& polygon);

// Inside or on the boundary of any part.
bool covers(const MultiPolygon& shape, Point2 q);

bool is_convex(const Polygon& polygon);

// Area of the intersection of two convex polygons. Throws NotConvex.
double convex_intersection_area(const Polygon& a, const Polygon& b);

}  // namespace stockpile
