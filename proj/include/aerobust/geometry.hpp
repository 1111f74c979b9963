// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace aerobust {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(Point a, double k) noexcept { return {a.x * k, a.y * k}; }
  friend bool operator==(Point, Point) = default;
};

constexpr double cross(Point a, Point b) noexcept { return a.x * b.y - a.y * b.x; }

using Polygon = std::vector<Point>;

/// Shoelace signed area; positive for the canonical winding.
inline double signed_area(std::span<const Point> poly) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) acc += cross(poly[i], poly[(i + 1) % n]);
  return acc / 2.0;
}

inline double area(std::span<const Point> poly) noexcept { return std::abs(signed_area(poly)); }

/// True when every turn has the same orientation (collinear turns allowed).
inline bool is_convex(std::span<const Point> poly) noexcept {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double turn = cross(poly[(i + 1) % n] - poly[i], poly[(i + 2) % n] - poly[(i + 1) % n]);
    if (turn == 0.0) continue;
    const int s = turn > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return sign != 0;
}

/// Andrew's monotone chain; result has positive winding and no collinear points.
inline Polygon convex_hull(std::span<const Point> pts) {
  Polygon p(pts.begin(), pts.end());
  std::sort(p.begin(), p.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  Polygon hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Sutherland-Hodgman clipping of `subject` by the convex, positively wound `clipper`.
inline Polygon clip_convex(std::span<const Point> subject, std::span<const Point> clipper) {
  Polygon output(subject.begin(), subject.end());
  const std::size_t m = clipper.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Point a = clipper[e];
    const Point b = clipper[(e + 1) % m];
    const Point edge = b - a;
    const Polygon input = std::move(output);
    output.clear();
    for (std::size_t i = 0, n = input.size(); i < n; ++i) {
      const Point cur = input[i];
      const Point prev = input[(i + n - 1) % n];
      const double dc = cross(edge, cur - a);
      const double dp = cross(edge, prev - a);
      if (dc >= 0.0) {
        if (dp < 0.0) output.push_back(prev + (cur - prev) * (dp / (dp - dc)));
        output.push_back(cur);
      } else if (dp >= 0.0) {
        output.push_back(prev + (cur - prev) * (dp / (dp - dc)));
      }
    }
  }
  return output;
}

/// Convex quadrilateral with positive (shoelace) winding.
///
/// In image coordinates (y down) the positive winding is the visually
/// clockwise order DOTA files use, so well-formed annotations keep their
/// vertex order. Reversed input is flipped while keeping the first vertex.
class OrientedBox {
 public:
  OrientedBox() = default;

  explicit OrientedBox(const std::array<Point, 4>& v) : vertices_(v) {
    if (signed_area(vertices_) < 0.0) std::swap(vertices_[1], vertices_[3]);
  }

  static OrientedBox axis_aligned(double x0, double y0, double x1, double y1) {
    return OrientedBox({Point{x0, y0}, Point{x1, y0}, Point{x1, y1}, Point{x0, y1}});
  }

  /// Rectangle of size w x h centered at (cx, cy), rotated by `radians`.
  static OrientedBox rotated(double cx, double cy, double w, double h, double radians) {
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    std::array<Point, 4> v;
    const std::array<Point, 4> local = {Point{-w / 2, -h / 2}, Point{w / 2, -h / 2}, Point{w / 2, h / 2},
                                        Point{-w / 2, h / 2}};
    for (int i = 0; i < 4; ++i) v[i] = {cx + local[i].x * c - local[i].y * s, cy + local[i].x * s + local[i].y * c};
    return OrientedBox(v);
  }

  const std::array<Point, 4>& vertices() const noexcept { return vertices_; }
  double area() const noexcept { return aerobust::area(vertices_); }
  bool is_degenerate() const noexcept { return !(area() > 1e-12); }
  bool is_convex() const noexcept { return aerobust::is_convex(vertices_); }

  OrientedBox translated(double dx, double dy) const {
    auto v = vertices_;
    for (auto& p : v) p = p + Point{dx, dy};
    return OrientedBox(v);
  }

  /// Convex hull of the vertices, padded back to four points if a vertex
  /// was interior (midpoint of the longest hull edge).
  OrientedBox convex_repaired() const {
    Polygon hull = convex_hull(vertices_);
    if (hull.size() == 4) return OrientedBox({hull[0], hull[1], hull[2], hull[3]});
    if (hull.size() != 3) return *this;
    std::size_t longest = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const Point d = hull[(i + 1) % 3] - hull[i];
      const double len = d.x * d.x + d.y * d.y;
      if (len > best) {
        best = len;
        longest = i;
      }
    }
    hull.insert(hull.begin() + static_cast<long>(longest) + 1, (hull[longest] + hull[(longest + 1) % 3]) * 0.5);
    return OrientedBox({hull[0], hull[1], hull[2], hull[3]});
  }

  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;

 private:
  std::array<Point, 4> vertices_{};
};

/// Intersection area of two convex boxes.
inline double intersection_area(const OrientedBox& a, const OrientedBox& b) {
  return area(clip_convex(a.vertices(), b.vertices()));
}

/// Intersection over union by convex clipping. Zero-area boxes give 0.
inline double rotated_iou(const OrientedBox& a, const OrientedBox& b) {
  const double area_a = a.area();
  const double area_b = b.area();
  if (!(area_a > 1e-12) || !(area_b > 1e-12)) return 0.0;
  // Clip in a fixed argument order so the result is exactly symmetric.
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  const bool swap = std::lexicographical_compare(vb.begin(), vb.end(), va.begin(), va.end(), [](Point p, Point q) {
    return p.x < q.x || (p.x == q.x && p.y < q.y);
  });
  const double inter = swap ? intersection_area(b, a) : intersection_area(a, b);
  const double uni = area_a + area_b - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace aerobust
