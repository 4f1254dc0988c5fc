#pragma once

// Planar convex-polygon utilities used for two-firm payoff sets.

#include <vector>

namespace infoshare::geo {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Half-plane a*x + b*y <= c.
struct HalfPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

inline double cross(const Point2& o, const Point2& p, const Point2& q) {
  return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
}

/// Andrew's monotone chain. Counterclockwise, starting at the lowest-then-leftmost
/// point, duplicates (within `dedup_tol`) and collinear points removed.
std::vector<Point2> convex_hull(std::vector<Point2> pts, double dedup_tol = 1e-9);

/// Sutherland-Hodgman clip of a convex CCW polygon by one half-plane.
std::vector<Point2> clip(const std::vector<Point2>& poly, const HalfPlane& h, double tol = 1e-12);

double area(const std::vector<Point2>& poly);

/// Edge half-planes of a CCW convex polygon (>= 3 vertices).
std::vector<HalfPlane> edge_halfplanes(const std::vector<Point2>& poly);

/// Euclidean distance from p to the filled polygon (0 inside).
double distance_to_polygon(const Point2& p, const std::vector<Point2>& poly);

/// Largest signed violation max_h (a*x + b*y - c) / |(a, b)|; <= 0 means inside.
double max_violation(const Point2& p, const std::vector<HalfPlane>& hs);

/// Hausdorff distance between two filled convex polygons.
double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b);

/// Drops consecutive duplicates and collinear vertices of a closed CCW polygon.
std::vector<Point2> simplify(const std::vector<Point2>& poly, double tol = 1e-9);

}  // namespace infoshare::geo
