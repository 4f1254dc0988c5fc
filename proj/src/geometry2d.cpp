#include "infoshare/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace infoshare::geo {

namespace {

double dist(const Point2& p, const Point2& q) { return std::hypot(p.x - q.x, p.y - q.y); }

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return dist(p, a);
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, {a.x + t * dx, a.y + t * dy});
}

}  // namespace

std::vector<Point2> convex_hull(std::vector<Point2> pts, double dedup_tol) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  std::vector<Point2> uniq;
  for (const auto& p : pts) {
    if (std::none_of(uniq.begin(), uniq.end(),
                     [&](const Point2& q) { return dist(p, q) <= dedup_tol; })) {
      uniq.push_back(p);
    }
  }
  if (uniq.size() <= 2) return uniq;

  std::vector<Point2> hull(2 * uniq.size());
  std::size_t k = 0;
  for (const auto& p : uniq) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = uniq.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], uniq[i]) <= 0.0) --k;
    hull[k++] = uniq[i];
  }
  hull.resize(k - 1);

  // Start at the lowest y, then lowest x.
  auto start = std::min_element(hull.begin(), hull.end(), [](const Point2& a, const Point2& b) {
    return a.y < b.y || (a.y == b.y && a.x < b.x);
  });
  std::rotate(hull.begin(), start, hull.end());
  return hull;
}

std::vector<Point2> clip(const std::vector<Point2>& poly, const HalfPlane& h, double tol) {
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  auto value = [&](const Point2& p) { return h.a * p.x + h.b * p.y - h.c; };
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& cur = poly[i];
    const Point2& nxt = poly[(i + 1) % n];
    const double vc = value(cur), vn = value(nxt);
    const bool in_c = vc <= tol, in_n = vn <= tol;
    if (in_c) out.push_back(cur);
    if (in_c != in_n && n > 1) {
      const double t = vc / (vc - vn);
      out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  return simplify(out);
}

std::vector<Point2> simplify(const std::vector<Point2>& poly, double tol) {
  std::vector<Point2> pts;
  for (const auto& p : poly) {
    if (pts.empty() || dist(pts.back(), p) > tol) pts.push_back(p);
  }
  while (pts.size() > 1 && dist(pts.front(), pts.back()) <= tol) pts.pop_back();
  bool changed = true;
  while (changed && pts.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Point2& prev = pts[(i + pts.size() - 1) % pts.size()];
      const Point2& next = pts[(i + 1) % pts.size()];
      const double base = dist(prev, next);
      if (base == 0.0 || std::abs(cross(prev, pts[i], next)) / base <= tol) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return pts;
}

double area(const std::vector<Point2>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * s;
}

std::vector<HalfPlane> edge_halfplanes(const std::vector<Point2>& poly) {
  std::vector<HalfPlane> hs;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    // Outward normal of a CCW edge p->q is (dy, -dx).
    const double a = q.y - p.y, b = -(q.x - p.x);
    const double norm = std::hypot(a, b);
    if (norm == 0.0) continue;
    hs.push_back({a / norm, b / norm, (a * p.x + b * p.y) / norm});
  }
  return hs;
}

double max_violation(const Point2& p, const std::vector<HalfPlane>& hs) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : hs) {
    const double norm = std::hypot(h.a, h.b);
    worst = std::max(worst, (h.a * p.x + h.b * p.y - h.c) / norm);
  }
  return worst;
}

double distance_to_polygon(const Point2& p, const std::vector<Point2>& poly) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  if (poly.size() == 1) return dist(p, poly[0]);
  if (poly.size() >= 3 && max_violation(p, edge_halfplanes(poly)) <= 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return best;
}

double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  // Distance to a convex set is convex, so the sup over a polygon sits at a vertex.
  double h = 0.0;
  for (const auto& p : a) h = std::max(h, distance_to_polygon(p, b));
  for (const auto& p : b) h = std::max(h, distance_to_polygon(p, a));
  return h;
}

}  // namespace infoshare::geo
