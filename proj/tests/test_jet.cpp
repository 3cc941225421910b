#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/differentiation/autodiff.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "charpt/errors.hpp"
#include "charpt/jet.hpp"
#include "support.hpp"

using namespace charpt;

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

// Five-point central differences of an (x, y) expression.
double fd1(const Expr& e, Point2 p, int axis, double h = 1e-3) {
  auto f = [&](double s) {
    Point2 q = p;
    (axis == 0 ? q.x : q.y) += s;
    return eval_point(e, q);
  };
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

double fd2(const Expr& e, Point2 p, int axis, double h = 1e-3) {
  auto f = [&](double s) {
    Point2 q = p;
    (axis == 0 ? q.x : q.y) += s;
    return eval_point(e, q);
  };
  return (-f(2 * h) + 16 * f(h) - 30 * f(0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
}

// Mixed second derivative from the 4x4 product of five-point stencils.
double fdxy(const Expr& e, Point2 p, double h = 1e-3) {
  const double w[4] = {1.0, -8.0, 8.0, -1.0};
  const double o[4] = {-2.0, -1.0, 1.0, 2.0};
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += w[i] * w[j] * eval_point(e, Point2{p.x + o[i] * h, p.y + o[j] * h});
  return s / (144.0 * h * h);
}

} // namespace

TEST_CASE("monomial and quadratic jets") {
  const Jet2 a = jet_of(parse_expr("x^2*y"), Point2{0.0, 0.0}, 3);
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; i + j <= 3; ++j) CHECK(a.coeff({i, j}) == ((i == 2 && j == 1) ? 1.0 : 0.0));
  const Jet2 b = jet_of(parse_expr("(x^2+y^2)/2"), Point2{0.0, 0.0}, 2);
  CHECK(b.coeff({2, 0}) == 0.5);
  CHECK(b.coeff({0, 2}) == 0.5);
  CHECK(b.coeff({1, 1}) == 0.0);
}

TEST_CASE("flat has an identically zero jet at the origin") {
  for (int order = 0; order <= kMaxJetOrder; ++order) {
    const Jet2 j = jet_of(parse_expr("flat(x)"), Point2{0.0, 0.4}, order);
    for (std::size_t i = 0; i < Jet2::size(order); ++i) CHECK(j[i] == 0.0);
  }
  const std::vector<double> s = builtin_series(Builtin::flat, 0.0, 12);
  for (double c : s) CHECK(c == 0.0);
}

TEST_CASE("flat jets away from zero match automatic differentiation") {
  using boost::math::differentiation::make_fvar;
  constexpr int order = 10;
  for (double x0 : {0.3, 0.7, -0.5, 1.4}) {
    const auto X = make_fvar<double, order>(x0);
    const auto F = exp(-1.0 / (X * X));
    const std::vector<double> s = builtin_series(Builtin::flat, x0, order);
    for (int n = 0; n <= order; ++n) {
      const double oracle = F.derivative(n) / boost::math::factorial<double>(n);
      INFO("x0 = " << x0 << ", n = " << n);
      CHECK(std::abs(s[n] - oracle) <= 1e-9 * std::max(1.0, std::abs(oracle)));
    }
  }
  // Approach to zero: coefficients shrink as x0 -> 0.
  for (int n = 0; n <= 6; ++n) CHECK(std::abs(builtin_series(Builtin::flat, 0.05, 6)[n]) < 1e-150);
}

TEST_CASE("builtin series match automatic differentiation") {
  using boost::math::differentiation::make_fvar;
  constexpr int order = 8;
  const double x0 = 0.37;
  const auto X = make_fvar<double, order>(x0);
  struct Case {
    Builtin fn;
    decltype(sin(X)) oracle;
  };
  const Case cases[] = {{Builtin::sin, sin(X)},  {Builtin::cos, cos(X)},   {Builtin::exp, exp(X)},
                        {Builtin::log, log(X)},  {Builtin::sqrt, sqrt(X)}, {Builtin::atan, atan(X)}};
  for (const auto& c : cases) {
    const std::vector<double> s = builtin_series(c.fn, x0, order);
    for (int n = 0; n <= order; ++n) {
      const double oracle = c.oracle.derivative(n) / boost::math::factorial<double>(n);
      INFO(expr::builtin_name(c.fn) << " n = " << n);
      CHECK(std::abs(s[n] - oracle) <= 1e-11 * std::max(1.0, std::abs(oracle)));
    }
  }
  CHECK_THROWS_AS(builtin_series(Builtin::log, -1.0, 2), DomainError);
  CHECK_THROWS_AS(builtin_series(Builtin::sqrt, 0.0, 2), DomainError);
}

TEST_CASE("first and second derivatives agree with finite differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    const Expr e = testing::random_smooth_expr(rng, 4);
    const Point2 p{u(rng), u(rng)};
    Jet2 j;
    try {
      j = jet_of(e, p, 2);
    } catch (const DomainError&) {
      continue;
    }
    INFO(print_expr(e) << " at " << p.x << ", " << p.y);
    CHECK(rel_diff(j.partial({1, 0}), fd1(e, p, 0)) < 1e-6);
    CHECK(rel_diff(j.partial({0, 1}), fd1(e, p, 1)) < 1e-6);
    CHECK(rel_diff(j.partial({2, 0}), fd2(e, p, 0)) < 1e-6);
    CHECK(rel_diff(j.partial({0, 2}), fd2(e, p, 1)) < 1e-6);
    CHECK(rel_diff(j.partial({1, 1}), fdxy(e, p)) < 1e-6);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("ring axioms on random jets") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_jet = [&](int order) {
    Jet2 j(order);
    for (std::size_t i = 0; i < Jet2::size(order); ++i) j[i] = u(rng);
    return j;
  };
  for (int order : {0, 1, 3, 6, 10}) {
    for (int rep = 0; rep < 20; ++rep) {
      const Jet2 a = random_jet(order), b = random_jet(order), c = random_jet(order);
      const Jet2 l1 = (a * b) * c, r1 = a * (b * c);
      const Jet2 l2 = a * (b + c), r2 = a * b + a * c;
      const Jet2 l3 = a * b, r3 = b * a;
      for (std::size_t i = 0; i < Jet2::size(order); ++i) {
        CHECK(rel_diff(l1[i], r1[i]) < 1e-12);
        CHECK(rel_diff(l2[i], r2[i]) < 1e-12);
        CHECK(rel_diff(l3[i], r3[i]) < 1e-12);
      }
    }
  }
}

TEST_CASE("reciprocal and powers invert each other") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Jet2 a(6);
  for (std::size_t i = 0; i < Jet2::size(6); ++i) a[i] = u(rng);
  a[0] = 1.3;
  const Jet2 one = a * reciprocal(a);
  CHECK(one[0] == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t i = 1; i < one.size(6); ++i) CHECK(std::abs(one[i]) < 1e-13);
  const Jet2 p = pow(a, 3) * pow(a, -3);
  for (std::size_t i = 1; i < p.size(6); ++i) CHECK(std::abs(p[i]) < 1e-12);
}

TEST_CASE("truncation commutes with evaluation") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int i = 0; i < 60; ++i) {
    const Expr e = testing::random_smooth_expr(rng, 3);
    const Point2 p{u(rng), u(rng)};
    Jet2 hi, lo;
    try {
      hi = jet_of(e, p, 7);
      lo = jet_of(e, p, 4);
    } catch (const DomainError&) {
      continue;
    }
    const Jet2 t = hi.truncated(4);
    INFO(print_expr(e));
    for (std::size_t k = 0; k < Jet2::size(4); ++k) CHECK(rel_diff(t[k], lo[k]) < 1e-13);
  }
}

TEST_CASE("univariate composition") {
  // outer t^2 at t = 0, inner s + s^2.
  Jet1 outer(4), inner(4);
  outer[2] = 1.0;
  inner[1] = 1.0;
  inner[2] = 1.0;
  const Jet1 r = compose_1d(outer, inner);
  const double expect[5] = {0.0, 0.0, 1.0, 2.0, 1.0};
  for (int n = 0; n <= 4; ++n) CHECK(r[static_cast<std::size_t>(n)] == expect[n]);
  // exp at 0 composed with the identity to order 2.
  Jet1 e(2), id(2);
  for (int n = 0; n <= 2; ++n) e[static_cast<std::size_t>(n)] = builtin_series(Builtin::exp, 0.0, 2)[n];
  id[1] = 1.0;
  const Jet1 ex = compose_1d(e, id);
  CHECK(ex[0] == 1.0);
  CHECK(ex[1] == 1.0);
  CHECK(ex[2] == 0.5);
  Jet1 shorter(1);
  CHECK_THROWS_AS(compose_1d(shorter, inner), OrderError);
}

TEST_CASE("three-variable jets follow the same rules") {
  ParseOptions po;
  po.allow_z = true;
  const Expr e = parse_expr("x*y*z + sin(z)*x^2", po);
  const Jet3 j = jet_of(e, Point3{0.2, -0.3, 0.5}, 3);
  CHECK(j.partial({1, 1, 1}) == doctest::Approx(1.0));
  CHECK(j.partial({2, 0, 1}) == doctest::Approx(2.0 * std::cos(0.5)));
  CHECK(j.partial({0, 0, 1}) == doctest::Approx(0.2 * -0.3 + std::cos(0.5) * 0.04));
}

TEST_CASE("order bounds are enforced") {
  CHECK_THROWS_AS(Jet2(kMaxJetOrder + 1), OrderError);
  CHECK_THROWS_AS(Jet2(2).truncated(3), OrderError);
}
