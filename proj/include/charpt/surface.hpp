#pragma once

// Graph surfaces z = g(x,y) in the Heisenberg group, carried in a chart obtained
// by a left translation and a rotation about the z-axis (both isometries).
//
// In chart coordinates v the surface is z = g~(v) with
//   g~ = Q + h,   Q = q20 v1^2/2 + q11 v1 v2 + q02 v2^2/2   (exact coefficients),
//   h  = P + sum_k [t_k(p + R v) - t_k(p)],
// where P is the polynomial part of g (re-expanded in the chart) and the t_k are
// the remaining non-polynomial summands of g evaluated in original coordinates.
// Keeping Q apart lets the horizontal gradient be formed without cancelling the
// large quadratic terms against the frame's linear terms.

#include <string>
#include <vector>

#include "charpt/expr.hpp"
#include "charpt/jet.hpp"
#include "charpt/polynomial.hpp"
#include "charpt/types.hpp"

namespace charpt {

// original = origin + R local with R = [[a, -b], [b, a]].
struct Chart {
  Point2 origin{0.0, 0.0};
  double a = 1.0;
  double b = 0.0;

  Point2 to_original(Point2 v) const { return {origin.x + a * v.x - b * v.y, origin.y + b * v.x + a * v.y}; }
  Point2 to_local(Point2 p) const {
    const double dx = p.x - origin.x;
    const double dy = p.y - origin.y;
    return {a * dx + b * dy, -b * dx + a * dy};
  }
  bool is_identity() const { return origin.x == 0.0 && origin.y == 0.0 && a == 1.0 && b == 0.0; }
};

struct QuadraticPart {
  double q20 = 0.0;
  double q11 = 0.0;
  double q02 = 0.0;
};

class GraphSurface {
public:
  GraphSurface() = default;
  GraphSurface(Expr g, std::string source, Window window);

  static GraphSurface parse(const std::string& text, Window window = {});

  const Expr& expr() const { return g_; }
  const std::string& source() const { return source_; }
  const Window& window() const { return window_; }
  const Chart& chart() const { return chart_; }
  const QuadraticPart& quadratic() const { return q_; }
  const Polynomial& polynomial_part() const { return poly_; }
  const std::vector<Expr>& terms() const { return terms_; }

  bool is_polynomial() const { return terms_.empty(); }
  bool has_flat() const;

  // Same surface in the chart centred at the original-coordinate point p and
  // rotated by (a, b); the quadratic part is re-absorbed into P.
  GraphSurface in_chart(Point2 p, double a, double b) const;

  // Moves the chart-quadratic coefficients of P into Q.
  void absorb_quadratic();
  // Declares Q exactly and subtracts it from P.
  void set_quadratic(const QuadraticPart& q);

  // Jet of h (chart coordinates) at local point v. The constant term is only
  // computed when need_value is set.
  Jet2 h_jet(Point2 v, int order, bool need_value = false) const;
  // Jet of g~ = Q + h.
  Jet2 local_jet(Point2 v, int order, bool need_value = false) const;

  double local_value(Point2 v) const;
  // z-coordinate in original coordinates of the surface point above chart point v.
  double original_z(Point2 v) const;
  Point2 to_original(Point2 v) const { return chart_.to_original(v); }
  Point2 to_local(Point2 p) const { return chart_.to_local(p); }

private:
  Expr g_;
  std::string source_;
  Window window_{};
  Chart chart_{};
  QuadraticPart q_{};
  Polynomial poly_orig_;
  Polynomial poly_;
  std::vector<Expr> terms_;
};

// K(v) = J(R v) for the rotation R = [[a, -b], [b, a]]; J given in the rotated
// frame's target coordinates.
Jet2 rotate_jet(const Jet2& j, double a, double b);

} // namespace charpt
