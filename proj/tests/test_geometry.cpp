#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "charpt/errors.hpp"
#include "charpt/geometry.hpp"
#include "support.hpp"

using namespace charpt;

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b))); }

// Closed-form contact frame coefficients used as an oracle.
struct ContactOracle {
  Expr beta, gamma;
  std::array<std::array<double, 3>, 2> at(double x, double y, double z) const {
    const double b = eval_point(beta, Point3{x, y, z});
    const double g = eval_point(gamma, Point3{x, y, z});
    return {{{1.0 + b * y * y, -b * x * y, -y / 2.0 + g * y}, {-b * x * y, 1.0 + b * x * x, x / 2.0 + g * x}}};
  }
};

// Five-point central difference of f at t.
template <class F>
double d5(const F& f, double t, double h) {
  return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
}

// H = -div(nu), nu = sum_i (X_i u / W) X_i, by central differences in space.
// u = z - g(x, y); its Euclidean gradient is taken by differences of g.
double mean_curvature_fd(const Expr& g, const ContactOracle& frame, Point3 p) {
  const double h = 1e-3;
  auto grad_u = [&](double x, double y) {
    const double gx = d5([&](double t) { return eval_point(g, Point2{t, y}); }, x, h);
    const double gy = d5([&](double t) { return eval_point(g, Point2{x, t}); }, y, h);
    return std::array<double, 3>{-gx, -gy, 1.0};
  };
  auto nu = [&](double x, double y, double z) {
    const auto c = frame.at(x, y, z);
    const auto du = grad_u(x, y);
    double xu[2];
    for (int i = 0; i < 2; ++i) xu[i] = c[i][0] * du[0] + c[i][1] * du[1] + c[i][2] * du[2];
    const double w = std::hypot(xu[0], xu[1]);
    std::array<double, 3> v{};
    for (int k = 0; k < 3; ++k) v[k] = (xu[0] * c[0][k] + xu[1] * c[1][k]) / w;
    return v;
  };
  const double d = 2e-3;
  const double div = d5([&](double t) { return nu(t, p.y, p.z)[0]; }, p.x, d) +
                     d5([&](double t) { return nu(p.x, t, p.z)[1]; }, p.y, d) +
                     d5([&](double t) { return nu(p.x, p.y, t)[2]; }, p.z, d);
  return -div;
}

} // namespace

TEST_CASE("plane: horizontal gradient and densities") {
  const GraphSurface s = GraphSurface::parse("0");
  const auto f = FrameModel::heisenberg();
  const HorizontalData hd = horizontal_data(f, s, {0.3, -0.4});
  CHECK(hd.X1u == doctest::Approx(0.2));
  CHECK(hd.X2u == doctest::Approx(0.15));
  CHECK(hd.W == doctest::Approx(0.25));
  CHECK(riemannian_density(hd) == doctest::Approx(std::sqrt(1.0 + 0.0625)));
  CHECK(sub_riemannian_density(hd) == doctest::Approx(0.25));
  CHECK(mean_curvature(hd) == 0.0);
}

TEST_CASE("paraboloid: second derivatives at the origin") {
  const GraphSurface s = GraphSurface::parse("(x^2+y^2)/2");
  const HorizontalData hd = horizontal_data(FrameModel::heisenberg(), s, {0.0, 0.0});
  CHECK(hd.X1u == 0.0);
  CHECK(hd.X2u == 0.0);
  CHECK(hd.second[0][0] == -1.0);
  CHECK(hd.second[0][1] == 0.5);
  CHECK(hd.second[1][0] == -0.5);
  CHECK(hd.second[1][1] == -1.0);
  CHECK_THROWS_AS(mean_curvature(hd), CharacteristicPointError);
}

TEST_CASE("commutator identity on random polynomial surfaces") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 5; ++s) {
    const GraphSurface surf = GraphSurface::parse(testing::random_polynomial_surface(rng));
    for (int i = 0; i < 400; ++i) {
      const HorizontalData hd = horizontal_data(FrameModel::heisenberg(), surf, {u(rng), u(rng)});
      CHECK(std::abs(hd.second[0][1] - hd.second[1][0] - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("mean curvature matches a finite-difference divergence") {
  const ContactOracle heis{parse_expr("0"), parse_expr("0")};
  std::mt19937_64 rng(23);
  int checked = 0;
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (const char* g : {"(x^2+y^2)/2", "x*y/2 + x^2*y", "sin(x)*y + x^3/3", "exp(x*y)/4 + y^2"}) {
    const GraphSurface surf = GraphSurface::parse(g);
    for (int i = 0; i < 20; ++i) {
      const Point2 p{u(rng), u(rng)};
      const HorizontalData hd = horizontal_data(FrameModel::heisenberg(), surf, p);
      if (hd.W < 0.2) continue; // the fixed-step oracle loses accuracy like d^4 / W^5
      const double oracle = mean_curvature_fd(surf.expr(), heis, {p.x, p.y, eval_point(surf.expr(), p)});
      INFO(std::string(g) << " at " << p.x << ", " << p.y);
      CHECK(std::abs(mean_curvature(hd) - oracle) <= 1e-6 * std::max(1.0, std::abs(oracle)));
      ++checked;
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("contact frame: mean curvature including the divergence term") {
  ParseOptions po;
  po.allow_z = true;
  const Expr beta = parse_expr("x*z + y", po);
  const Expr gamma = parse_expr("x^2 + z*y^2", po);
  const FrameModel frame = FrameModel::contact(beta, gamma);
  const ContactOracle oracle{beta, gamma};
  std::mt19937_64 rng(29);
  int checked = 0;
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (const char* g : {"(x^2+y^2)/2", "x*y/3 + y^3"}) {
    const GraphSurface surf = GraphSurface::parse(g);
    for (int i = 0; i < 20; ++i) {
      const Point2 p{u(rng), u(rng)};
      const HorizontalData hd = horizontal_data(frame, surf, p);
      if (hd.W < 0.2) continue; // the fixed-step oracle loses accuracy like d^4 / W^5
      const double ref = mean_curvature_fd(surf.expr(), oracle, {p.x, p.y, eval_point(surf.expr(), p)});
      INFO(std::string(g) << " at " << p.x << ", " << p.y);
      CHECK(std::abs(mean_curvature(hd) - ref) <= 1e-6 * std::max(1.0, std::abs(ref)));
      ++checked;
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("contact frame validation") {
  ParseOptions po;
  po.allow_z = true;
  CHECK_THROWS_AS(FrameModel::contact(parse_expr("1", po), parse_expr("0", po)), FrameError);
  CHECK_THROWS_AS(FrameModel::contact(parse_expr("0", po), parse_expr("x", po)), FrameError);
  CHECK_THROWS_AS(FrameModel::contact(parse_expr("0", po), parse_expr("z", po)), FrameError);
  CHECK_NOTHROW(FrameModel::contact(parse_expr("x*z", po), parse_expr("x*y*z", po)));
  // beta = gamma = 0 reproduces the Heisenberg frame.
  const FrameModel zero = FrameModel::contact(parse_expr("0", po), parse_expr("0", po));
  const GraphSurface s = GraphSurface::parse("x*y/2 + x^2*y + y^3");
  const HorizontalData a = horizontal_data(zero, s, {0.3, 0.2});
  const HorizontalData b = horizontal_data(FrameModel::heisenberg(), s, {0.3, 0.2});
  CHECK(a.W == doctest::Approx(b.W).epsilon(1e-14));
  CHECK(mean_curvature(a) == doctest::Approx(mean_curvature(b)).epsilon(1e-12));
}

TEST_CASE("cylinder has H = -1/R") {
  for (double R : {0.5, 1.0, 2.0}) {
    const Expr u = parse_expr("x^2 + y^2 - " + testing::fmt17(R * R), ParseOptions{true});
    for (int i = 0; i < 8; ++i) {
      const double phi = 0.3 + i * 0.7;
      const Point3 p{R * std::cos(phi), R * std::sin(phi), 0.1 * i - 0.4};
      CHECK(std::abs(mean_curvature_implicit(FrameModel::heisenberg(), u, p) + 1.0 / R) <= 1e-9);
    }
  }
}

TEST_CASE("implicit form: plane, scaling and agreement with the graph form") {
  const auto f = FrameModel::heisenberg();
  const ParseOptions po{true};
  CHECK(mean_curvature_implicit(f, parse_expr("z", po), {0.4, 0.1, 0.0}) == 0.0);
  const Point3 q{0.2, -0.3, 0.7};
  CHECK(mean_curvature_implicit(f, parse_expr("x^2 + z*y", po), q) ==
        doctest::Approx(mean_curvature_implicit(f, parse_expr("2*(x^2 + z*y)", po), q)).epsilon(1e-13));
  CHECK_THROWS_AS(horizontal_data_implicit(f, parse_expr("x^2 + y^2 + z^2", po), {0.0, 0.0, 0.0}), SubmersionError);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (const char* g : {"x*y/2 + x^2*y", "sin(x*y) + y^2/3", "(x^2+y^2)/2 + x^3"}) {
    const GraphSurface surf = GraphSurface::parse(g);
    const Expr ui = parse_expr(std::string("z - (") + g + ")", po);
    for (int i = 0; i < 20; ++i) {
      const Point2 p{u(rng), u(rng)};
      const HorizontalData hd = horizontal_data(f, surf, p);
      if (hd.W < 1e-3) continue;
      const double a = mean_curvature(hd);
      const double b = mean_curvature_implicit(f, ui, {p.x, p.y, eval_point(surf.expr(), p)});
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("frame rotation leaves W and H unchanged") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-0.9, 0.9), th(-3.1, 3.1);
  for (const char* g : {"x*y/2 + x^2*y", "(x^2+y^2)/2", "x*y/2 + y^2/2 + antider_x(flat(x))", "cos(x) * y^2"}) {
    const GraphSurface surf = GraphSurface::parse(g);
    for (int i = 0; i < 20; ++i) {
      const Point2 p{u(rng), u(rng)};
      const HorizontalData a = horizontal_data(FrameModel::heisenberg(), surf, p);
      const HorizontalData b = horizontal_data(FrameModel::heisenberg(th(rng)), surf, p);
      if (a.W < 1e-3) continue;
      INFO(std::string(g));
      CHECK(rel_diff(a.W, b.W) <= 1e-9);
      CHECK(std::abs(mean_curvature(a) - mean_curvature(b)) <= 1e-9 * std::max(1.0, std::abs(mean_curvature(a))));
    }
  }
}

TEST_CASE("C0 bound: closed forms, refinement and the curvature estimate") {
  const auto f = FrameModel::heisenberg();
  const Window w{-1, 1, -1, 1};
  CHECK(c0_bound(f, GraphSurface::parse("0"), w) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c0_bound(f, GraphSurface::parse("(x^2+y^2)/2"), w) == doctest::Approx(5.0).epsilon(1e-14));
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const char* g : {"x*y/2 + x^2*y", "x*y/2 + y^2/2 + antider_x(flat(x))", "sin(x)*y + x^3"}) {
    const GraphSurface surf = GraphSurface::parse(g);
    double prev = 0.0;
    for (int level = 2; level <= 6; ++level) {
      const double c = c0_bound(f, surf, w, level);
      CHECK(c >= prev);
      prev = c;
    }
    // |H| W <= C0 at sampled points, with C0 from the finest grid and a margin
    // for points between grid nodes.
    for (int i = 0; i < 200; ++i) {
      const HorizontalData hd = horizontal_data(f, surf, {u(rng), u(rng)});
      if (hd.W == 0.0) continue;
      CHECK(std::abs(mean_curvature(hd)) * hd.W <= prev * 1.05);
    }
  }
  // Near the characteristic point of the paraboloid.
  const GraphSurface par = GraphSurface::parse("(x^2+y^2)/2");
  for (double t : {1e-1, 1e-3, 1e-6}) {
    const HorizontalData hd = horizontal_data(f, par, {t, 0.0});
    CHECK(std::abs(mean_curvature(hd)) <= 5.0 / hd.W);
  }
}
