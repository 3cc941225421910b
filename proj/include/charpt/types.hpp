#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace charpt {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
  double norm() const { return std::hypot(x, y); }
};

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Window {
  double x0 = -1.0;
  double x1 = 1.0;
  double y0 = -1.0;
  double y1 = 1.0;

  bool contains(Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double size() const { return std::max(width(), height()); }
  // Distance from p to the nearest edge; negative outside.
  double inradius(Point2 p) const {
    return std::min(std::min(p.x - x0, x1 - p.x), std::min(p.y - y0, y1 - p.y));
  }
  bool valid() const { return x1 > x0 && y1 > y0; }
};

using Mat2 = std::array<std::array<double, 2>, 2>;

inline double det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

} // namespace charpt
