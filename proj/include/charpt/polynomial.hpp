#pragma once

#include <optional>
#include <vector>

#include "charpt/expr.hpp"
#include "charpt/types.hpp"

namespace charpt {

// Dense bivariate polynomial sum c_ij x^i y^j, stored by total degree.
// Kept exact under affine substitution so that cancellations of the normal-form
// quadratic happen at the coefficient level rather than in evaluated sums.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(int degree);
  static Polynomial constant(double c);
  static Polynomial x();
  static Polynomial y();

  int degree() const { return degree_; }
  double coeff(int i, int j) const;
  void set_coeff(int i, int j, double c);
  void add_to_coeff(int i, int j, double c);
  bool is_zero() const;

  double operator()(Point2 p) const;
  // Sum |c_ij| |x|^i |y|^j; a scale for rounding-error estimates.
  double abs_eval(Point2 p) const;

  Polynomial derivative_x() const;
  Polynomial derivative_y() const;

  // p(x0 + m00 X + m01 Y, y0 + m10 X + m11 Y) as a polynomial in (X, Y).
  Polynomial affine_substitute(Point2 shift, const Mat2& m) const;

  // Taylor coefficients at base, coefficient (i,j) = d^i_x d^j_y p / (i! j!),
  // laid out like Jet<2> (total degree, then y-exponent), truncated at order.
  std::vector<double> taylor(Point2 base, int order) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& a);
  Polynomial operator-() const;
  Polynomial pow(int n) const;

private:
  static int index(int i, int j) { return (i + j) * (i + j + 1) / 2 + j; }
  void grow(int degree);
  void trim();

  int degree_ = 0;
  std::vector<double> c_{0.0};
};

// Converts e to a polynomial when it only uses +, -, *, integer powers >= 0,
// negation, and division by variable-free subexpressions.
std::optional<Polynomial> to_polynomial(const Expr& e);

} // namespace charpt
