#pragma once

// Shared generators for the property suites: random smooth expressions,
// random polynomial surfaces, degenerate quadratic/cubic graphs, rotated
// copies of a surface and a finite-difference Jacobian.

#include <cmath>
#include <cstdio>
#include <random>
#include <array>
#include <string>

#include "charpt/expr.hpp"
#include "charpt/geometry.hpp"
#include "charpt/surface.hpp"

namespace charpt::testing {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "(c)" so that negative coefficients parse inside products.
inline std::string coef(double v) { return "(" + fmt17(v) + ")"; }

// Random expression in x, y that is smooth on [-1, 1]^2 (log and sqrt only see
// arguments bounded away from 0).
inline Expr random_smooth_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 10);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  using namespace expr;
  switch (pick(rng)) {
  case 0: return constant(std::round(c(rng) * 8.0) / 8.0);
  case 1: return var_x();
  case 2: return var_y();
  case 3: return add(random_smooth_expr(rng, depth - 1), random_smooth_expr(rng, depth - 1));
  case 4: return sub(random_smooth_expr(rng, depth - 1), random_smooth_expr(rng, depth - 1));
  case 5: return mul(random_smooth_expr(rng, depth - 1), random_smooth_expr(rng, depth - 1));
  case 6: return pow(random_smooth_expr(rng, depth - 1), std::uniform_int_distribution<int>(2, 3)(rng));
  case 7: return call(Builtin::sin, random_smooth_expr(rng, depth - 1));
  case 8: return call(Builtin::exp, mul(constant(0.25), random_smooth_expr(rng, depth - 1)));
  case 9: return call(Builtin::log, add(constant(3.0), pow(random_smooth_expr(rng, depth - 1), 2)));
  default: return call(Builtin::atan, random_smooth_expr(rng, depth - 1));
  }
}

// Random polynomial of total degree <= 4 without constant and linear terms.
inline std::string random_polynomial_surface(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::string s = "0";
  for (int d = 2; d <= 4; ++d)
    for (int i = 0; i <= d; ++i)
      s += " + " + coef(c(rng)) + "*x^" + std::to_string(i) + "*y^" + std::to_string(d - i);
  return s;
}

struct DegenerateSample {
  std::string text;
  double g20, g11, g02;
};

// g = g20 x^2/2 + g11 xy + g02 y^2/2 + random cubic with g20 g02 = g11^2 - 1/4,
// so the origin is a degenerate characteristic point.
inline DegenerateSample random_degenerate_cubic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  DegenerateSample d;
  d.g11 = c(rng);
  do d.g02 = c(rng);
  while (std::abs(d.g02) < 0.2);
  d.g20 = (d.g11 * d.g11 - 0.25) / d.g02;
  d.text = coef(d.g20 / 2.0) + "*x^2 + " + coef(d.g11) + "*x*y + " + coef(d.g02 / 2.0) + "*y^2";
  for (int i = 0; i <= 3; ++i) d.text += " + " + coef(c(rng)) + "*x^" + std::to_string(i) + "*y^" + std::to_string(3 - i);
  return d;
}

// Surface rotated about the z-axis by phi: z = g(R(-phi)(x, y)). Plain
// substitution, so g must not contain identifiers with an x or y in them.
inline std::string rotated(const std::string& g, double phi) {
  const std::string c = coef(std::cos(phi)), s = coef(std::sin(phi));
  std::string out;
  for (char ch : g) {
    if (ch == 'x')
      out += "(" + c + "*x + " + s + "*y)";
    else if (ch == 'y')
      out += "(-" + s + "*x + " + c + "*y)";
    else
      out += ch;
  }
  return out;
}

// Jacobian of (x, y) -> (X1u, X2u) by five-point differences.
inline double jacobian_fd(const FrameModel& f, const GraphSurface& s, Point2 p, double h = 1e-3) {
  auto d = [&](int axis) {
    auto at = [&](double t) {
      Point2 q = p;
      (axis == 0 ? q.x : q.y) += t;
      const HorizontalData hd = horizontal_data(f, s, q);
      return std::array<double, 2>{hd.X1u, hd.X2u};
    };
    const auto a = at(2 * h), b = at(h), c = at(-h), e = at(-2 * h);
    return std::array<double, 2>{(-a[0] + 8 * b[0] - 8 * c[0] + e[0]) / (12 * h),
                                 (-a[1] + 8 * b[1] - 8 * c[1] + e[1]) / (12 * h)};
  };
  const auto dx = d(0), dy = d(1);
  return dx[0] * dy[1] - dy[0] * dx[1];
}

} // namespace charpt::testing
